#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "packcache/cost.hpp"
#include "packcache/sim.hpp"

using namespace packcache;

namespace {

CostParams reference_scale() {
    CostParams p;
    p.frames = 13;
    p.tokens_per_frame = 4084;
    p.window = 4;
    p.anchors = 4333;
    return p;
}

}  // namespace

TEST_CASE("latent frame mapping") {
    CHECK(latent_from_video_frames(24) == 7);
    CHECK(latent_from_video_frames(48) == 13);
    CHECK(latent_from_video_frames(4) == 2);
    CHECK_THROWS_AS(latent_from_video_frames(0), std::invalid_argument);
    CHECK_THROWS_AS(latent_from_video_frames(-4), std::invalid_argument);
    CHECK_THROWS_AS(latent_from_video_frames(26), std::invalid_argument);
}

TEST_CASE("full-cache attended keys grow affinely") {
    const CostParams p = reference_scale();
    for (std::int64_t t = 1; t <= p.frames; ++t)
        CHECK(attended_keys(PolicyKind::Full, p, t) ==
              Rational(p.anchors + (t - 1) * p.tokens_per_frame + p.tokens_per_frame));
    CHECK_THROWS_AS(attended_keys(PolicyKind::Full, p, 0), std::invalid_argument);
    CHECK_THROWS_AS(attended_keys(PolicyKind::Full, p, 14), std::invalid_argument);
}

TEST_CASE("sliding-window attended keys saturate after the first frame") {
    const CostParams p = reference_scale();
    CHECK(attended_keys(PolicyKind::SlidingWindow, p, 1) ==
          Rational(p.anchors + p.tokens_per_frame));
    for (std::int64_t t = 2; t <= p.frames; ++t)
        CHECK(attended_keys(PolicyKind::SlidingWindow, p, t) ==
              Rational(p.anchors + 2 * p.tokens_per_frame));
}

TEST_CASE("packcache attended keys saturate at anchors plus two frame budgets") {
    const CostParams p = reference_scale();
    for (std::int64_t t = 1; t <= p.window; ++t)
        CHECK(attended_keys(PolicyKind::PackCache, p, t) ==
              attended_keys(PolicyKind::Full, p, t));
    for (std::int64_t t = p.window + 1; t <= p.frames; ++t)
        CHECK(attended_keys(PolicyKind::PackCache, p, t) ==
              Rational(p.anchors + 2 * p.tokens_per_frame));
}

TEST_CASE("cumulative totals at the reference configuration") {
    const CostParams p = reference_scale();
    const CostTable full = cost_model(PolicyKind::Full, p);
    const CostTable pack = cost_model(PolicyKind::PackCache, p);
    CHECK(full.cumulative.back() == Rational(427973));
    CHECK(pack.cumulative.back() == Rational(170681));
    CHECK(full.per_frame.back() == Rational(57425));
    CHECK(pack.per_frame.back() == Rational(12501));
    CHECK(cumulative_ratio(p) == Rational(427973, 170681));
    CHECK(last_frame_ratio(p) == Rational(57425, 12501));
    CHECK(to_double(cumulative_ratio(p)) > 1.75);
    CHECK(to_double(last_frame_ratio(p)) > 2.64);
}

TEST_CASE("ratios improve with sequence length") {
    CostParams p = reference_scale();
    Rational prev_cum(0), prev_last(0);
    for (std::int64_t frames : {5, 7, 9, 13, 21, 33}) {
        p.frames = frames;
        const Rational cum = cumulative_ratio(p);
        const Rational last = last_frame_ratio(p);
        CHECK(cum > prev_cum);
        CHECK(last > prev_last);
        prev_cum = cum;
        prev_last = last;
    }
}

TEST_CASE("expected counts scale with the keep probability") {
    CostParams p = reference_scale();
    p.keep_prob = Rational(1, 2);
    CHECK(attended_keys(PolicyKind::SlidingWindow, p, 5) ==
          Rational(p.anchors) + Rational(p.tokens_per_frame, 2) +
              Rational(p.tokens_per_frame));
    CHECK(attended_keys(PolicyKind::Full, p, 5) ==
          Rational(p.anchors) + 4 * Rational(p.tokens_per_frame, 2) +
              Rational(p.tokens_per_frame));
    // packed history can never exceed the one-frame budget
    for (std::int64_t t = p.window + 1; t <= p.frames; ++t) {
        const Rational hist = attended_keys(PolicyKind::PackCache, p, t) -
                              Rational(p.anchors) - Rational(p.tokens_per_frame);
        CHECK(hist >= 0);
        CHECK(hist <= Rational(p.tokens_per_frame));
    }
}

TEST_CASE("parameter validation") {
    CostParams p = reference_scale();
    p.frames = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = reference_scale();
    p.keep_prob = Rational(0);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = reference_scale();
    p.keep_prob = Rational(3, 2);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = reference_scale();
    p.anchors = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("analytic counts equal simulator measurements when nothing is masked") {
    for (const auto& [frames, tokens, window] :
         std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>>{
             {6, 8, 2}, {8, 12, 3}, {10, 16, 4}, {9, 8, 5}}) {
        SimConfig cfg;
        cfg.frames = frames;
        cfg.tokens_per_frame = tokens;
        cfg.window = window;
        cfg.heads = 1;
        cfg.head_dim = 16;
        cfg.steps_per_frame = 1;
        cfg.layers = 1;
        cfg.keep_prob = 1.0;
        cfg.seed = 7;
        cfg.text_tokens = 3;
        cfg.cond_tokens = 5;

        CostParams p;
        p.frames = frames;
        p.tokens_per_frame = tokens;
        p.window = window;
        p.anchors = cfg.text_tokens + cfg.cond_tokens;

        for (PolicyKind kind :
             {PolicyKind::Full, PolicyKind::SlidingWindow, PolicyKind::PackCache}) {
            cfg.policy.kind = kind;
            const GenerationTrace trace = run(cfg);
            const CostTable table = cost_model(kind, p);
            for (std::int64_t t = 1; t <= frames; ++t) {
                CHECK(Rational(trace.frames[std::size_t(t - 1)].attended_keys) ==
                      table.per_frame[std::size_t(t - 1)]);
            }
        }
    }
}
