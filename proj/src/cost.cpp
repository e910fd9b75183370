#include "packcache/cost.hpp"

#include <algorithm>
#include <stdexcept>

namespace packcache {

void CostParams::validate() const {
    if (frames < 1) throw std::invalid_argument("frames must be >= 1");
    if (tokens_per_frame < 1) throw std::invalid_argument("tokens_per_frame must be >= 1");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (anchors < 0) throw std::invalid_argument("anchors must be >= 0");
    if (keep_prob <= 0 || keep_prob > 1)
        throw std::invalid_argument("keep_prob must be in (0, 1]");
}

namespace {

// Expected history occupancy after the pack that closes `after_frame`
// (>= window). Supplies age through the window as expected values: each
// pack keeps min(budget, supply) per frame plus re-flow toward recent
// frames, mirroring the packer's integer arithmetic; exact when
// keep_prob = 1 because supplies then always cover the budgets.
Rational packed_occupancy(const CostParams& p, std::int64_t after_frame) {
    PlanSpec spec;
    spec.window = p.window;
    spec.budget_total = p.tokens_per_frame;
    const AllocationPlan plan = build_plan(spec);

    const Rational fresh = Rational(p.tokens_per_frame) * p.keep_prob;
    std::vector<Rational> budget(plan.token_budgets.size());
    for (std::size_t i = 0; i < budget.size(); ++i)
        budget[i] = Rational(plan.token_budgets[i]);

    std::vector<Rational> supply(std::size_t(p.window), fresh);
    for (std::int64_t pack_frame = p.window;; ++pack_frame) {
        std::vector<Rational> kept(supply.size());
        Rational leftover(p.tokens_per_frame);
        for (std::size_t d = 0; d < supply.size(); ++d) {
            kept[d] = std::min(budget[d], supply[d]);
            leftover -= kept[d];
        }
        for (std::size_t d = 0; d < supply.size() && leftover > 0; ++d) {
            const Rational extra = std::min(Rational(supply[d] - kept[d]), leftover);
            kept[d] += extra;
            leftover -= extra;
        }
        if (pack_frame == after_frame) {
            Rational total(0);
            for (const auto& k : kept) total += k;
            return total;
        }
        for (std::size_t d = supply.size() - 1; d > 0; --d) supply[d] = kept[d - 1];
        supply[0] = fresh;
    }
}

}  // namespace

Rational attended_keys(PolicyKind kind, const CostParams& p, std::int64_t t) {
    p.validate();
    if (t < 1 || t > p.frames) throw std::invalid_argument("frame index out of range");
    const Rational anchors(p.anchors);
    const Rational fresh_frame(p.tokens_per_frame);
    const Rational unmasked = fresh_frame * p.keep_prob;
    switch (kind) {
        case PolicyKind::Full:
            return anchors + Rational(t - 1) * unmasked + fresh_frame;
        case PolicyKind::SlidingWindow:
            if (t == 1) return anchors + fresh_frame;
            return anchors + unmasked + fresh_frame;
        case PolicyKind::PackCache:
            if (t <= p.window) return anchors + Rational(t - 1) * unmasked + fresh_frame;
            return anchors + packed_occupancy(p, t - 1) + fresh_frame;
    }
    throw std::invalid_argument("unknown policy kind");
}

CostTable cost_model(PolicyKind kind, const CostParams& p) {
    p.validate();
    CostTable table;
    table.kind = kind;
    Rational running(0);
    for (std::int64_t t = 1; t <= p.frames; ++t) {
        const Rational keys = attended_keys(kind, p, t);
        running += keys;
        table.per_frame.push_back(keys);
        table.cumulative.push_back(running);
    }
    return table;
}

Rational cumulative_ratio(const CostParams& p) {
    const CostTable full = cost_model(PolicyKind::Full, p);
    const CostTable pack = cost_model(PolicyKind::PackCache, p);
    return full.cumulative.back() / pack.cumulative.back();
}

Rational last_frame_ratio(const CostParams& p) {
    return attended_keys(PolicyKind::Full, p, p.frames) /
           attended_keys(PolicyKind::PackCache, p, p.frames);
}

std::int64_t latent_from_video_frames(std::int64_t video_frames) {
    if (video_frames < 4 || video_frames % 4 != 0)
        throw std::invalid_argument("video frame count must be a positive multiple of 4");
    return video_frames / 4 + 1;
}

}  // namespace packcache
