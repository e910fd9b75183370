#pragma once

#include <cstdint>
#include <vector>

#include "packcache/packer.hpp"
#include "packcache/rational.hpp"

namespace packcache {

// Analytic attended-key counts. keep_prob enters as the expected
// unmasked fraction, so counts are exact rationals; at keep_prob = 1
// they equal the simulator's measured counts exactly.
struct CostParams {
    std::int64_t frames = 13;  // T, latent frames
    std::int64_t tokens_per_frame = 4084;
    std::int64_t window = 4;
    std::int64_t anchors = 4333;
    Rational keep_prob = Rational(1);

    void validate() const;
};

// Expected key positions attended while generating frame t (1-based):
// anchors + retained history + the frame's own tokens.
Rational attended_keys(PolicyKind kind, const CostParams& params, std::int64_t t);

struct CostTable {
    PolicyKind kind = PolicyKind::Full;
    std::vector<Rational> per_frame;   // index 0 = frame 1
    std::vector<Rational> cumulative;  // running totals
};

CostTable cost_model(PolicyKind kind, const CostParams& params);

// Full-cache vs PackCache cumulative totals, and the same ratio for the
// final frame alone.
Rational cumulative_ratio(const CostParams& params);
Rational last_frame_ratio(const CostParams& params);

// 4x temporal compression plus the boundary latent: 24 video frames map
// to 7 latent frames, 48 to 13. Requires a multiple of 4.
std::int64_t latent_from_video_frames(std::int64_t video_frames);

}  // namespace packcache
