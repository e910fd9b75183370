#include "packcache/sim.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace packcache {

void SimConfig::validate() const {
    if (frames < 1) throw std::invalid_argument("frames must be >= 1");
    if (tokens_per_frame < 1) throw std::invalid_argument("tokens_per_frame must be >= 1");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (heads < 1) throw std::invalid_argument("heads must be >= 1");
    if (steps_per_frame < 1) throw std::invalid_argument("steps_per_frame must be >= 1");
    if (layers < 1) throw std::invalid_argument("layers must be >= 1");
    if (!(keep_prob > 0.0 && keep_prob <= 1.0))
        throw std::invalid_argument("keep_prob must be in (0, 1]");
    if (decay_injection < 0.0) throw std::invalid_argument("decay_injection must be >= 0");
    if (text_tokens < 0 || cond_tokens < 0)
        throw std::invalid_argument("anchor token counts must be >= 0");
    if (rng_algorithm != kPhiloxId)
        throw std::invalid_argument("unsupported rng algorithm: " + rng_algorithm);
    policy.validate();
    rope.validate();
    if (rope.head_dim != head_dim)
        throw std::invalid_argument("rope head_dim must match the simulator head_dim");
    if (frames * tokens_per_frame > (std::int64_t(1) << 20))
        throw std::invalid_argument("frames * tokens_per_frame exceeds the desk-scale cap");
}

namespace {

std::int64_t grid_width(std::int64_t tokens) {
    std::int64_t w = 1;
    while (w * w < tokens) ++w;
    return w;
}

Eigen::VectorXd random_vector(std::int64_t size, CounterRng& rng) {
    Eigen::VectorXd v(size);
    for (std::int64_t i = 0; i < size; ++i) v[i] = rng.normal();
    return v;
}

Eigen::MatrixXd random_matrix(std::int64_t rows, std::int64_t cols, CounterRng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c) m(r, c) = rng.normal();
    return m;
}

// Per-head unit directions; counter-based, so every call reproduces the
// same vectors for a given seed.
std::vector<Eigen::VectorXd> head_directions(const SimConfig& cfg) {
    CounterRng rng(cfg.seed, StreamDomain::Direction, 0);
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(std::size_t(cfg.heads));
    for (int h = 0; h < cfg.heads; ++h) {
        Eigen::VectorXd v = random_vector(cfg.head_dim, rng);
        const double norm = v.norm();
        if (norm > 0) v /= norm;
        dirs.push_back(std::move(v));
    }
    return dirs;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

}  // namespace

FrameFeatures synthesize_frame_features(const SimConfig& cfg, std::int64_t frame_index,
                                        CounterRng& rng) {
    const std::int64_t dk = std::int64_t(cfg.heads) * cfg.head_dim;
    FrameFeatures f;
    f.queries = random_matrix(cfg.tokens_per_frame, dk, rng);
    f.keys = random_matrix(cfg.tokens_per_frame, dk, rng);
    f.values = random_matrix(cfg.tokens_per_frame, dk, rng);
    if (cfg.decay_injection > 0.0) {
        const auto dirs = head_directions(cfg);
        for (int h = 0; h < cfg.heads; ++h) {
            const Eigen::RowVectorXd q_shift =
                (cfg.decay_injection * dirs[std::size_t(h)]).transpose();
            const Eigen::RowVectorXd k_shift =
                (cfg.decay_injection * double(frame_index) * dirs[std::size_t(h)])
                    .transpose();
            for (std::int64_t i = 0; i < cfg.tokens_per_frame; ++i) {
                f.queries.row(i).segment(h * cfg.head_dim, cfg.head_dim) += q_shift;
                f.keys.row(i).segment(h * cfg.head_dim, cfg.head_dim) += k_shift;
            }
        }
    }
    return f;
}

GenerationTrace run(const SimConfig& cfg, const FrameObserver& observer) {
    cfg.validate();
    const auto sim_start = std::chrono::steady_clock::now();
    const std::int64_t dk = std::int64_t(cfg.heads) * cfg.head_dim;
    const std::int64_t capacity = cfg.policy.kind == PolicyKind::Full
                                      ? std::max(cfg.frames, cfg.window)
                                      : cfg.window;
    KvCache cache(capacity, cfg.tokens_per_frame, dk, dk);

    {
        CounterRng rng(cfg.seed, StreamDomain::AnchorFeatures, 0);
        std::vector<CacheEntry> text;
        for (std::int64_t i = 0; i < cfg.text_tokens; ++i) {
            CacheEntry e;
            e.key = random_vector(dk, rng);
            e.value = random_vector(dk, rng);
            e.region = Region::text();
            e.pos = {0, 0, 0, i};
            text.push_back(std::move(e));
        }
        std::vector<CacheEntry> cond;
        const std::int64_t cond_gw = grid_width(cfg.cond_tokens);
        for (std::int64_t i = 0; i < cfg.cond_tokens; ++i) {
            CacheEntry e;
            e.key = random_vector(dk, rng);
            e.value = random_vector(dk, rng);
            e.region = Region::cond();
            e.pos = {0, i / cond_gw, i % cond_gw, cfg.text_tokens + i};
            cond.push_back(std::move(e));
        }
        cache.set_anchors(std::move(text), std::move(cond));
    }

    GenerationTrace trace;
    trace.anchor_count = cache.anchor_count();
    const std::int64_t frame_gw = grid_width(cfg.tokens_per_frame);
    AttentionOptions attn_opt;
    attn_opt.heads = cfg.heads;
    attn_opt.accumulate_mass = true;

    for (std::int64_t f = 1; f <= cfg.frames; ++f) {
        const auto frame_start = std::chrono::steady_clock::now();
        if (!cfg.policy.cumulative_attn_mass) cache.reset_attn_mass();

        FrameTrace ft;
        ft.frame_index = f;

        const bool rebased = cfg.policy.rebase != RebaseMode::None;
        const std::int64_t t_pos = rebased ? f - cache.dropped_frames() : f;
        const std::int64_t seq_base =
            cache.anchor_count() + (rebased ? cache.history_token_count()
                                            : (f - 1) * cfg.tokens_per_frame);

        FrameCache current;
        current.frame_index = f;
        current.original_token_count = cfg.tokens_per_frame;
        current.entries.resize(std::size_t(cfg.tokens_per_frame));
        std::vector<Position3D> positions(std::size_t(cfg.tokens_per_frame));
        for (std::int64_t i = 0; i < cfg.tokens_per_frame; ++i) {
            positions[std::size_t(i)] = {t_pos, i / frame_gw, i % frame_gw, seq_base + i};
            auto& e = current.entries[std::size_t(i)];
            e.region = Region::frame(f);
            e.pos = positions[std::size_t(i)];
        }

        CounterRng feature_rng(cfg.seed, StreamDomain::FrameFeatures, std::uint32_t(f));
        for (std::int64_t s = 0; s < cfg.steps_per_frame; ++s) {
            for (std::int64_t l = 0; l < cfg.layers; ++l) {
                FrameFeatures feat = synthesize_frame_features(cfg, f, feature_rng);
                for (std::int64_t i = 0; i < cfg.tokens_per_frame; ++i) {
                    current.entries[std::size_t(i)].key = feat.keys.row(i).transpose();
                    current.entries[std::size_t(i)].value = feat.values.row(i).transpose();
                }
                AttentionInput in;
                in.queries = std::move(feat.queries);
                in.query_pos = positions;
                in.query_frame = f;
                const AttentionResult res =
                    masked_attention(in, cache, &current, cfg.rope, attn_opt);
                ft.attended_keys = res.visible_keys;
                ft.stats.push_back(region_stats(res.weights, res.layout, s, l));
            }
        }

        CounterRng mask_rng(cfg.seed, StreamDomain::FrameMask, std::uint32_t(f));
        for (auto& e : current.entries) e.masked = !(mask_rng.uniform() < cfg.keep_prob);

        ft.report = on_frame_complete(cache, std::move(current), cfg.policy);
        ft.occupancy = ft.report.occupancy;
        ft.dropped_frames = cache.dropped_frames();
        ft.wall_ms = elapsed_ms(frame_start);
        trace.total_attended += ft.attended_keys;
        trace.frames.push_back(std::move(ft));
        if (observer) observer(cache, trace.frames.back());
    }
    trace.wall_ms = elapsed_ms(sim_start);
    return trace;
}

std::map<Region, double> aggregate_region_means(const FrameTrace& frame) {
    std::map<Region, std::pair<double, std::int64_t>> acc;
    for (const auto& st : frame.stats)
        for (const auto& [region, mean] : st.mean_attention) {
            acc[region].first += mean;
            acc[region].second += 1;
        }
    std::map<Region, double> out;
    for (const auto& [region, slot] : acc)
        out[region] = slot.first / double(slot.second);
    return out;
}

}  // namespace packcache
