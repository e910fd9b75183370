#include "packcache/attention.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace packcache {

AttentionResult masked_attention(const AttentionInput& input, KvCache& cache,
                                 FrameCache* current, const RopeConfig& rope_cfg,
                                 const AttentionOptions& options) {
    rope_cfg.validate();
    if (options.heads < 1) throw std::invalid_argument("heads must be >= 1");
    const std::int64_t dk = cache.key_dim();
    const std::int64_t dv = cache.value_dim();
    if (std::int64_t(options.heads) * rope_cfg.head_dim != dk)
        throw std::invalid_argument("heads * head_dim must equal cache key dim");
    if (dv % options.heads != 0)
        throw std::invalid_argument("value dim must divide evenly across heads");
    if (input.queries.cols() != dk)
        throw std::invalid_argument("query width must equal cache key dim");
    if (std::int64_t(input.query_pos.size()) != input.queries.rows())
        throw std::invalid_argument("one query position per query row required");
    if (input.queries.rows() == 0) throw std::invalid_argument("no query rows");

    // Key columns in cache order: anchors, frames oldest first, current.
    std::vector<CacheEntry*> cols;
    std::vector<char> visible;
    std::vector<RegionSpan> layout;
    auto push_block = [&](const Region& label, std::vector<CacheEntry>& entries,
                          bool causal_ok) {
        if (entries.empty()) return;
        if (layout.empty() || layout.back().region != label)
            layout.push_back({label, std::int64_t(cols.size()), 0});
        for (auto& e : entries) {
            cols.push_back(&e);
            visible.push_back(causal_ok && !e.masked);
            ++layout.back().count;
        }
    };
    {
        // Anchors may mix text and cond entries; split spans per region.
        auto& anchors = cache.anchors_mut();
        for (auto& e : anchors) {
            if (layout.empty() || layout.back().region != e.region)
                layout.push_back({e.region, std::int64_t(cols.size()), 0});
            cols.push_back(&e);
            visible.push_back(!e.masked);
            ++layout.back().count;
        }
    }
    for (auto& f : cache.frames_mut())
        push_block(Region::frame(f.frame_index), f.entries,
                   f.frame_index <= input.query_frame);
    if (current != nullptr) push_block(Region::current(), current->entries, true);

    const std::int64_t ncols = std::int64_t(cols.size());
    if (ncols == 0) throw std::invalid_argument("attention requires a non-empty key set");
    std::int64_t visible_count = 0;
    for (char v : visible) visible_count += v;
    if (visible_count == 0)
        throw std::invalid_argument("no key is visible to the query frame");

    const int heads = options.heads;
    const int head_dim = rope_cfg.head_dim;
    const std::int64_t value_head = dv / heads;
    const std::int64_t nq = input.queries.rows();
    const double inv_sqrt_d = 1.0 / std::sqrt(double(head_dim));
    const double neg_inf = -std::numeric_limits<double>::infinity();

    Eigen::MatrixXd rot_q(nq, dk);
    for (std::int64_t r = 0; r < nq; ++r)
        rot_q.row(r) = rotate_heads(input.queries.row(r).transpose(), input.query_pos[r],
                                    false, rope_cfg, heads)
                           .transpose();
    Eigen::MatrixXd rot_k(ncols, dk);
    Eigen::MatrixXd values(ncols, dv);
    for (std::int64_t c = 0; c < ncols; ++c) {
        const CacheEntry& e = *cols[std::size_t(c)];
        if (e.key.size() != dk || e.value.size() != dv)
            throw std::invalid_argument("cache entry dimension mismatch");
        rot_k.row(c) =
            rotate_heads(e.key, e.pos, e.region == Region::text(), rope_cfg, heads)
                .transpose();
        values.row(c) = e.value.transpose();
    }

    AttentionResult result;
    result.output = Eigen::MatrixXd::Zero(nq, dv);
    result.weights = Eigen::MatrixXd::Zero(nq, ncols);
    result.layout = std::move(layout);
    result.visible_keys = visible_count;

    for (int h = 0; h < heads; ++h) {
        Eigen::MatrixXd logits = rot_q.middleCols(h * head_dim, head_dim) *
                                 rot_k.middleCols(h * head_dim, head_dim).transpose() *
                                 inv_sqrt_d;
        for (std::int64_t c = 0; c < ncols; ++c)
            if (!visible[std::size_t(c)]) logits.col(c).setConstant(neg_inf);
        for (std::int64_t r = 0; r < nq; ++r) {
            const double row_max = logits.row(r).maxCoeff();
            Eigen::ArrayXd w = (logits.row(r).transpose().array() - row_max).exp();
            w /= w.sum();
            result.weights.row(r) += w.matrix().transpose() / double(heads);
            result.output.row(r).segment(h * value_head, value_head) =
                w.matrix().transpose() * values.middleCols(h * value_head, value_head);
        }
    }

    if (options.accumulate_mass)
        for (std::int64_t c = 0; c < ncols; ++c)
            cols[std::size_t(c)]->attn_mass += result.weights.col(c).sum();

    return result;
}

RegionStats region_stats(const Eigen::MatrixXd& weights, const std::vector<RegionSpan>& layout,
                         std::int64_t step, std::int64_t layer) {
    const std::int64_t ncols = weights.cols();
    if (weights.rows() == 0) throw std::invalid_argument("no query rows");
    std::vector<char> covered(std::size_t(ncols), 0);
    for (const auto& span : layout) {
        if (span.begin < 0 || span.count < 0 || span.begin + span.count > ncols)
            throw std::invalid_argument("span outside the weight columns");
        for (std::int64_t c = span.begin; c < span.begin + span.count; ++c) {
            if (covered[std::size_t(c)])
                throw std::invalid_argument("overlapping region spans");
            covered[std::size_t(c)] = 1;
        }
    }
    for (char c : covered)
        if (!c) throw std::invalid_argument("region spans must cover every column");

    RegionStats stats;
    stats.step = step;
    stats.layer = layer;
    std::map<Region, std::pair<double, std::int64_t>> acc;  // total weight, column count
    for (const auto& span : layout) {
        if (span.count == 0) continue;
        auto& slot = acc[span.region];
        slot.first += weights.middleCols(span.begin, span.count).sum();
        slot.second += span.count;
    }
    for (const auto& [region, slot] : acc)
        stats.mean_attention[region] =
            slot.first / (double(weights.rows()) * double(slot.second));
    return stats;
}

}  // namespace packcache
