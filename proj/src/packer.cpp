#include "packcache/packer.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace packcache {

void CachePolicy::validate() const {
    if (!(rho > 0 && rho < 1)) throw std::invalid_argument("rho must be in (0, 1)");
    if (b_min < 0 || b_min > 1) throw std::invalid_argument("b_min must be in [0, 1]");
    if (quota_frames < 0) throw std::invalid_argument("quota_frames must be >= 0");
}

std::string PackReport::csv_header() {
    return "frame_index,kept_per_frame,removed_masked,removed_by_budget,occupancy";
}

std::string PackReport::csv_row() const {
    std::ostringstream out;
    out << frame_index << ',';
    for (std::size_t i = 0; i < kept_per_frame.size(); ++i) {
        if (i) out << '|';
        out << kept_per_frame[i];
    }
    out << ',' << removed_masked << ',' << removed_by_budget << ',' << occupancy;
    return out.str();
}

std::vector<std::int64_t> select_tokens(const FrameCache& frame, std::int64_t budget) {
    if (budget < 0) throw std::invalid_argument("budget must be >= 0");
    std::vector<std::int64_t> kept;
    for (std::int64_t i = 0; i < std::int64_t(frame.entries.size()); ++i)
        if (!frame.entries[std::size_t(i)].masked) kept.push_back(i);
    if (std::int64_t(kept.size()) > budget) {
        std::sort(kept.begin(), kept.end(), [&](std::int64_t a, std::int64_t b) {
            const double ma = frame.entries[std::size_t(a)].attn_mass;
            const double mb = frame.entries[std::size_t(b)].attn_mass;
            if (ma != mb) return ma > mb;
            return a < b;
        });
        kept.resize(std::size_t(budget));
        std::sort(kept.begin(), kept.end());
    }
    return kept;
}

namespace {

void validate_incoming(const KvCache& cache, const FrameCache& frame) {
    const std::int64_t expected = (cache.frames().empty()
                                       ? cache.dropped_frames()
                                       : cache.frames().back().frame_index) +
                                  1;
    if (frame.frame_index != expected)
        throw std::invalid_argument("frame arrived out of temporal order");
    if (frame.original_token_count != cache.frame_token_count() ||
        std::int64_t(frame.entries.size()) != cache.frame_token_count())
        throw std::invalid_argument("frame token count must equal the per-frame budget");
    for (const auto& e : frame.entries) {
        if (e.region != Region::frame(frame.frame_index))
            throw std::invalid_argument("frame entries must carry the frame's region");
        if (e.pos.t != frame.entries.front().pos.t)
            throw std::invalid_argument("frame entries must share one temporal coordinate");
        if (e.key.size() != cache.key_dim() || e.value.size() != cache.value_dim())
            throw std::invalid_argument("frame entry dimension mismatch");
    }
}

void shift_time(KvCache& cache, std::int64_t shift) {
    for (auto& f : cache.frames_mut())
        for (auto& e : f.entries) {
            e.pos.t -= shift;
            if (e.pos.t < 0)
                throw InvariantViolation("rebase-nonnegative: temporal coordinate below zero");
        }
}

// Continuous 1D renumbering: anchors keep their indices, history tokens
// take rank order behind them. FullyContinuous additionally re-rasters
// each frame's spatial grid over the surviving tokens.
void renumber(KvCache& cache, RebaseMode mode) {
    std::int64_t seq = cache.anchor_count();
    for (auto& f : cache.frames_mut()) {
        const std::int64_t grid_w = [&] {
            std::int64_t w = 0;
            for (const auto& e : f.entries) w = std::max(w, e.pos.w + 1);
            return w;
        }();
        for (std::size_t i = 0; i < f.entries.size(); ++i) {
            f.entries[i].pos.seq = seq++;
            if (mode == RebaseMode::FullyContinuous && grid_w > 0) {
                f.entries[i].pos.h = std::int64_t(i) / grid_w;
                f.entries[i].pos.w = std::int64_t(i) % grid_w;
            }
        }
    }
}

PackReport full_append(KvCache& cache, FrameCache&& frame) {
    if (std::int64_t(cache.frames().size()) + 1 > cache.window_capacity())
        throw InvariantViolation(
            "window-capacity: full-cache policy needs capacity for every frame");
    PackReport report;
    report.frame_index = frame.frame_index;
    cache.frames_mut().push_back(std::move(frame));
    for (const auto& f : cache.frames())
        report.kept_per_frame.push_back(std::int64_t(f.entries.size()));
    report.occupancy = cache.occupancy();
    return report;
}

PackReport sliding_replace(KvCache& cache, FrameCache&& frame, const CachePolicy& policy) {
    PackReport report;
    report.frame_index = frame.frame_index;
    const std::int64_t evicted = std::int64_t(cache.frames().size());
    cache.frames_mut().clear();
    cache.note_dropped(evicted);
    FrameCache kept;
    kept.frame_index = frame.frame_index;
    kept.original_token_count = frame.original_token_count;
    for (auto& e : frame.entries) {
        if (e.masked) {
            ++report.removed_masked;
            continue;
        }
        kept.entries.push_back(std::move(e));
    }
    cache.frames_mut().push_back(std::move(kept));
    if (policy.rebase != RebaseMode::None) {
        if (evicted > 0) shift_time(cache, evicted);
        renumber(cache, policy.rebase);
    }
    report.kept_per_frame.push_back(std::int64_t(cache.frames().back().entries.size()));
    report.occupancy = cache.occupancy();
    return report;
}

void pack_frames(KvCache& cache, const CachePolicy& policy, PackReport& report) {
    const std::int64_t depth = std::int64_t(cache.frames().size());
    PlanSpec spec;
    spec.window = depth;
    spec.budget_total = cache.frame_token_count();
    spec.source = policy.plan_source;
    spec.rho = policy.rho;
    spec.quota_mode = policy.quota_mode;
    spec.b_min = policy.b_min;
    spec.quota_frames = policy.quota_frames;
    const AllocationPlan plan = build_plan(spec);

    // Plan index 0 is the most recent frame; the deque is oldest first.
    std::vector<std::int64_t> budget(static_cast<std::size_t>(depth));
    std::vector<std::int64_t> supply(static_cast<std::size_t>(depth));
    for (std::int64_t i = 0; i < depth; ++i) {
        budget[std::size_t(i)] = plan.token_budgets[std::size_t(depth - 1 - i)];
        supply[std::size_t(i)] = cache.frames()[std::size_t(i)].unmasked_count();
    }

    // Budget re-flow: shares unfilled by short frames move to the most
    // recent frames first, up to their unmasked supply.
    std::vector<std::int64_t> kept(static_cast<std::size_t>(depth));
    std::int64_t leftover = cache.frame_token_count();
    for (std::int64_t i = 0; i < depth; ++i) {
        kept[std::size_t(i)] = std::min(budget[std::size_t(i)], supply[std::size_t(i)]);
        leftover -= kept[std::size_t(i)];
    }
    for (std::int64_t i = depth - 1; i >= 0 && leftover > 0; --i) {
        const std::int64_t extra =
            std::min(supply[std::size_t(i)] - kept[std::size_t(i)], leftover);
        kept[std::size_t(i)] += extra;
        leftover -= extra;
    }

    for (std::int64_t i = 0; i < depth; ++i) {
        auto& f = cache.frames_mut()[std::size_t(i)];
        const auto keep_idx = select_tokens(f, kept[std::size_t(i)]);
        FrameCache packed;
        packed.frame_index = f.frame_index;
        packed.original_token_count = f.original_token_count;
        packed.entries.reserve(keep_idx.size());
        std::size_t k = 0;
        for (std::int64_t idx = 0; idx < std::int64_t(f.entries.size()); ++idx) {
            if (k < keep_idx.size() && keep_idx[k] == idx) {
                packed.entries.push_back(std::move(f.entries[std::size_t(idx)]));
                ++k;
            } else if (f.entries[std::size_t(idx)].masked) {
                ++report.removed_masked;
            } else {
                ++report.removed_by_budget;
            }
        }
        f = std::move(packed);
    }
    report.kept_per_frame = std::move(kept);
}

}  // namespace

PackReport on_frame_complete(KvCache& cache, FrameCache frame, const CachePolicy& policy) {
    policy.validate();
    validate_incoming(cache, frame);
    switch (policy.kind) {
        case PolicyKind::Full:
            return full_append(cache, std::move(frame));
        case PolicyKind::SlidingWindow:
            return sliding_replace(cache, std::move(frame), policy);
        case PolicyKind::PackCache:
            break;
    }

    PackReport report;
    report.frame_index = frame.frame_index;
    std::int64_t capacity = cache.window_capacity();
    if (policy.quota_mode == MinQuotaMode::Strict && policy.b_min > 0 &&
        Rational(capacity) * policy.b_min > 1)
        capacity = floor_to_i64(Rational(1) / policy.b_min);

    const std::int64_t evicted =
        std::max<std::int64_t>(0, std::int64_t(cache.frames().size()) + 1 - capacity);
    for (std::int64_t i = 0; i < evicted; ++i) cache.frames_mut().pop_front();
    if (evicted > 0) cache.note_dropped(evicted);
    cache.frames_mut().push_back(std::move(frame));
    if (policy.rebase != RebaseMode::None && evicted > 0) shift_time(cache, evicted);

    const bool packed = std::int64_t(cache.frames().size()) == capacity;
    if (packed) {
        pack_frames(cache, policy, report);
    } else {
        for (const auto& f : cache.frames())
            report.kept_per_frame.push_back(std::int64_t(f.entries.size()));
    }
    if (policy.rebase != RebaseMode::None) renumber(cache, policy.rebase);
    report.occupancy = cache.occupancy();

    if (std::int64_t(cache.frames().size()) > cache.window_capacity())
        throw InvariantViolation("window-capacity: frame count exceeds the window");
    if (packed) {
        if (cache.history_token_count() > cache.frame_token_count())
            throw InvariantViolation("pack-budget: history tokens exceed one frame's budget");
        for (const auto& f : cache.frames())
            for (const auto& e : f.entries)
                if (e.masked)
                    throw InvariantViolation("pack-masked: masked entry survived packing");
    }
    return report;
}

}  // namespace packcache
