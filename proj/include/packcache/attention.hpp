#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "packcache/cache.hpp"
#include "packcache/rope.hpp"
#include "packcache/types.hpp"

namespace packcache {

// Contiguous block of key columns belonging to one region.
struct RegionSpan {
    Region region;
    std::int64_t begin = 0;
    std::int64_t count = 0;
};

struct AttentionOptions {
    int heads = 1;
    bool accumulate_mass = true;
};

struct AttentionInput {
    Eigen::MatrixXd queries;            // rows x (heads * head_dim)
    std::vector<Position3D> query_pos;  // one per query row
    std::int64_t query_frame = 1;       // frame the queries belong to
};

struct AttentionResult {
    Eigen::MatrixXd output;   // rows x value_dim
    Eigen::MatrixXd weights;  // rows x key columns, averaged over heads
    std::vector<RegionSpan> layout;
    std::int64_t visible_keys = 0;
};

// Scaled-dot-product attention of one frame's queries against the cache
// (anchors, then history frames oldest first) plus the in-progress
// frame's own keys. Queries and keys are rotated at their positions
// before the dot product. Visibility: anchors always, history frames
// only up to the query frame (causal), the current frame fully
// (bidirectional), and masked entries never; hidden columns take a -inf
// logit before the max-subtracted softmax, so their weight is exactly 0.
// With options.accumulate_mass, every key's attn_mass grows by its
// head-averaged weight column summed over the query rows.
AttentionResult masked_attention(const AttentionInput& input, KvCache& cache,
                                 FrameCache* current, const RopeConfig& rope_cfg,
                                 const AttentionOptions& options);

struct RegionStats {
    std::map<Region, double> mean_attention;  // mean weight per (row, region column)
    std::int64_t step = 0;
    std::int64_t layer = 0;
};

// Mean softmax weight over (query row, key column) pairs for each
// region. The spans must partition the weight columns exactly.
RegionStats region_stats(const Eigen::MatrixXd& weights, const std::vector<RegionSpan>& layout,
                         std::int64_t step, std::int64_t layer);

}  // namespace packcache
