#include "packcache/rope.hpp"

#include <cmath>
#include <stdexcept>

namespace packcache {

void RopeConfig::validate() const {
    if (head_dim < 2 || head_dim % 2 != 0)
        throw std::invalid_argument("head_dim must be even and positive");
    if (dims_t < 1 || dims_h < 1 || dims_w < 1)
        throw std::invalid_argument("every axis needs at least one rotation pair");
    if (dims_t + dims_h + dims_w != head_dim / 2)
        throw std::invalid_argument("axis pairs must sum to head_dim / 2");
    if (scale_t < 1 || scale_h < 1 || scale_w < 1)
        throw std::invalid_argument("coordinate scales must be at least 1");
    if (!(theta_base > 1.0)) throw std::invalid_argument("theta_base must exceed 1");
}

RopeConfig RopeConfig::for_head_dim(int head_dim) {
    if (head_dim < 6 || head_dim % 2 != 0)
        throw std::invalid_argument("head_dim must be even and at least 6");
    const int pairs = head_dim / 2;
    int dims_t = std::max(1, pairs / 5);
    if ((pairs - dims_t) % 2 != 0) ++dims_t;
    RopeConfig cfg;
    cfg.head_dim = head_dim;
    cfg.dims_t = dims_t;
    cfg.dims_h = (pairs - dims_t) / 2;
    cfg.dims_w = cfg.dims_h;
    cfg.validate();
    return cfg;
}

namespace {

struct AxisSpec {
    double coord;
    int dims;
};

Eigen::VectorXd rotate_pairs(const Eigen::VectorXd& head, const AxisSpec* axes, int axis_count,
                             const RopeConfig& cfg) {
    Eigen::VectorXd out(head.size());
    int pair = 0;
    for (int a = 0; a < axis_count; ++a) {
        for (int i = 0; i < axes[a].dims; ++i, ++pair) {
            const double freq = std::pow(cfg.theta_base, -double(i) / double(axes[a].dims));
            const double angle = axes[a].coord * freq;
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            const double x0 = head[2 * pair];
            const double x1 = head[2 * pair + 1];
            out[2 * pair] = x0 * c - x1 * s;
            out[2 * pair + 1] = x0 * s + x1 * c;
        }
    }
    return out;
}

}  // namespace

Eigen::VectorXd rotate_3d(const Eigen::VectorXd& head, const Position3D& pos,
                          const RopeConfig& cfg) {
    cfg.validate();
    if (head.size() != cfg.head_dim) throw std::invalid_argument("head vector size mismatch");
    const AxisSpec axes[3] = {
        {double(pos.t * cfg.scale_t), cfg.dims_t},
        {double(pos.h * cfg.scale_h), cfg.dims_h},
        {double(pos.w * cfg.scale_w), cfg.dims_w},
    };
    return rotate_pairs(head, axes, 3, cfg);
}

Eigen::VectorXd rotate_1d(const Eigen::VectorXd& head, std::int64_t seq,
                          const RopeConfig& cfg) {
    cfg.validate();
    if (head.size() != cfg.head_dim) throw std::invalid_argument("head vector size mismatch");
    const AxisSpec axis = {double(seq), cfg.head_dim / 2};
    return rotate_pairs(head, &axis, 1, cfg);
}

Eigen::VectorXd rotate_entry(const Eigen::VectorXd& head, const Position3D& pos,
                             bool is_text, const RopeConfig& cfg) {
    if (is_text && cfg.one_d_for_text) return rotate_1d(head, pos.seq, cfg);
    return rotate_3d(head, pos, cfg);
}

Eigen::VectorXd rotate_heads(const Eigen::VectorXd& vec, const Position3D& pos,
                             bool is_text, const RopeConfig& cfg, int heads) {
    if (heads < 1) throw std::invalid_argument("heads must be >= 1");
    if (vec.size() != std::int64_t(heads) * cfg.head_dim)
        throw std::invalid_argument("vector size must be heads * head_dim");
    Eigen::VectorXd out(vec.size());
    for (int h = 0; h < heads; ++h)
        out.segment(h * cfg.head_dim, cfg.head_dim) =
            rotate_entry(vec.segment(h * cfg.head_dim, cfg.head_dim), pos, is_text, cfg);
    return out;
}

std::vector<Position3D> rebase(std::vector<Position3D> positions, std::int64_t delta_t,
                               std::int64_t seq_start) {
    if (delta_t < 0) throw std::invalid_argument("delta_t must be >= 0");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        positions[i].t -= delta_t;
        if (positions[i].t < 0)
            throw InvariantViolation("rebase-nonnegative: temporal coordinate below zero");
        positions[i].seq = seq_start + std::int64_t(i);
    }
    return positions;
}

}  // namespace packcache
