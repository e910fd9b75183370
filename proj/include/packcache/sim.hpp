#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "packcache/attention.hpp"
#include "packcache/cache.hpp"
#include "packcache/packer.hpp"
#include "packcache/rng.hpp"
#include "packcache/rope.hpp"

namespace packcache {

// Toy frame-by-frame generation loop. Frames are refined over
// steps_per_frame passes; every pass resamples the frame's features from
// the seeded stream and runs masked attention against the policy-managed
// cache, so attn_mass accumulates exactly as the policy will see it. A
// Bernoulli draw then decides which tokens enter the cache.
struct SimConfig {
    std::int64_t frames = 8;             // T
    std::int64_t tokens_per_frame = 16;  // N, also the history budget B_one
    std::int64_t window = 4;             // W
    int heads = 2;
    int head_dim = 16;
    std::int64_t steps_per_frame = 8;
    std::int64_t layers = 1;
    double keep_prob = 0.5;  // probability a generated token is written to the cache
    std::uint64_t seed = 1;
    double decay_injection = 0.0;  // shared-direction strength giving recency structure
    std::int64_t text_tokens = 4;
    std::int64_t cond_tokens = 16;
    std::string rng_algorithm = kPhiloxId;
    CachePolicy policy;
    RopeConfig rope;

    void validate() const;
};

struct FrameTrace {
    std::int64_t frame_index = 0;
    std::int64_t attended_keys = 0;  // visible keys per attention pass this frame
    std::int64_t occupancy = 0;      // cache occupancy after the frame was handed over
    std::int64_t dropped_frames = 0;  // cumulative evictions so far
    PackReport report;
    std::vector<RegionStats> stats;  // one per (step, layer)
    double wall_ms = 0.0;
};

struct GenerationTrace {
    std::vector<FrameTrace> frames;
    std::int64_t anchor_count = 0;
    std::int64_t total_attended = 0;  // sum of per-frame attended_keys
    double wall_ms = 0.0;
};

// Called after each frame is handed to the policy, with the cache in its
// post-pack state.
using FrameObserver = std::function<void(const KvCache&, const FrameTrace&)>;

GenerationTrace run(const SimConfig& config, const FrameObserver& observer = {});

struct FrameFeatures {
    Eigen::MatrixXd queries;  // N x (heads * head_dim)
    Eigen::MatrixXd keys;     // N x (heads * head_dim)
    Eigen::MatrixXd values;   // N x (heads * head_dim)
};

// One refinement pass worth of synthetic features. Keys of frame f carry
// a shared per-head direction scaled by decay_injection * f, queries the
// same direction scaled by decay_injection, so recent frames align more
// with current queries; directions come from their own seeded stream.
FrameFeatures synthesize_frame_features(const SimConfig& config, std::int64_t frame_index,
                                        CounterRng& rng);

// Mean attention per region across a frame's recorded (step, layer)
// stats entries.
std::map<Region, double> aggregate_region_means(const FrameTrace& frame);

// Plain-text config: one key=value per line, '#' comments, unknown keys
// rejected.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

}  // namespace packcache
