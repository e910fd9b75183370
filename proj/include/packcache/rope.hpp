#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "packcache/types.hpp"

namespace packcache {

// Rotary position embedding over (t, h, w) coordinates. The head's
// rotation pairs are split into three contiguous axis blocks, ordered
// t then h then w; pair i of an axis rotates by
//   coord * scale_axis * theta_base^(-i / dims_axis).
// Text tokens may instead be rotated by their flat sequence index across
// all pairs (plain 1D rotary embedding).
struct RopeConfig {
    int head_dim = 16;  // per-head vector size, even
    int dims_t = 2;     // rotation pairs assigned to each axis
    int dims_h = 3;
    int dims_w = 3;
    int scale_t = 4;    // coordinate scales, all >= 1
    int scale_h = 8;
    int scale_w = 8;
    double theta_base = 10000.0;
    bool one_d_for_text = true;

    void validate() const;

    // Default split: roughly a fifth of the pairs to time, the rest
    // evenly between height and width.
    static RopeConfig for_head_dim(int head_dim);
};

// How positions are rewritten when old frames leave the window.
enum class RebaseMode {
    None,                // positions keep their original coordinates
    SpatialPreserving,   // shift t back, renumber seq; h and w untouched
    FullyContinuous,     // also reassign h and w as a fresh raster scan
};

Eigen::VectorXd rotate_3d(const Eigen::VectorXd& head, const Position3D& pos,
                          const RopeConfig& cfg);

Eigen::VectorXd rotate_1d(const Eigen::VectorXd& head, std::int64_t seq,
                          const RopeConfig& cfg);

// Rotation for one cache entry or query vector: text tokens take the 1D
// path when the config asks for it, everything else rotates in 3D.
Eigen::VectorXd rotate_entry(const Eigen::VectorXd& head, const Position3D& pos,
                             bool is_text, const RopeConfig& cfg);

// `vec` holds `heads` concatenated head vectors; each head rotates with
// the same angles.
Eigen::VectorXd rotate_heads(const Eigen::VectorXd& vec, const Position3D& pos,
                             bool is_text, const RopeConfig& cfg, int heads);

// Shift temporal coordinates back by delta_t and renumber the flat
// sequence indices contiguously from seq_start, preserving order.
// Spatial coordinates are never touched. Rejects a shift that would take
// any temporal coordinate below zero.
std::vector<Position3D> rebase(std::vector<Position3D> positions, std::int64_t delta_t,
                               std::int64_t seq_start);

}  // namespace packcache
