#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "packcache/alloc.hpp"
#include "packcache/cache.hpp"
#include "packcache/rope.hpp"
#include "packcache/types.hpp"

namespace packcache {

enum class PolicyKind { Full, SlidingWindow, PackCache };

struct CachePolicy {
    PolicyKind kind = PolicyKind::PackCache;
    PlanSource plan_source = PlanSource::ClosedForm;
    Rational rho = Rational(1, 2);  // NormalizedDecay plans only
    MinQuotaMode quota_mode = MinQuotaMode::None;
    Rational b_min = Rational(0);      // Strict quota only
    std::int64_t quota_frames = 3;     // RecentFloor quota only
    RebaseMode rebase = RebaseMode::SpatialPreserving;
    bool cumulative_attn_mass = false;  // keep mass across frames instead of per-frame

    void validate() const;
};

struct PackReport {
    std::int64_t frame_index = 0;
    std::vector<std::int64_t> kept_per_frame;  // oldest frame first
    std::int64_t removed_masked = 0;
    std::int64_t removed_by_budget = 0;
    std::int64_t occupancy = 0;

    static std::string csv_header();
    std::string csv_row() const;  // kept_per_frame joined with '|'
};

// Indices of the unmasked entries with the largest attn_mass, ties
// broken toward the earlier intra-frame index; at most `budget` of them,
// returned ascending so spatial order survives packing.
std::vector<std::int64_t> select_tokens(const FrameCache& frame, std::int64_t budget);

// Hand a completed frame to the policy. Full appends it whole (masked
// entries stay as zero-weight rows). SlidingWindow replaces the history
// with the frame's unmasked tokens. PackCache appends unpruned until the
// window is full, packs every history frame to its budget share once it
// is, and on later frames evicts the oldest frame, rebases the retained
// positions, and repacks. Frames must arrive in order with exactly the
// cache's per-frame token count.
PackReport on_frame_complete(KvCache& cache, FrameCache frame, const CachePolicy& policy);

}  // namespace packcache
