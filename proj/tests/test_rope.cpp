#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "packcache/rng.hpp"
#include "packcache/rope.hpp"

using namespace packcache;

namespace {

Eigen::VectorXd random_vec(CounterRng& rng, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

Position3D random_pos(CounterRng& rng, std::int64_t max_coord) {
    return {std::int64_t(rng.next_u32() % std::uint32_t(max_coord)),
            std::int64_t(rng.next_u32() % std::uint32_t(max_coord)),
            std::int64_t(rng.next_u32() % std::uint32_t(max_coord)),
            std::int64_t(rng.next_u32() % 1024)};
}

}  // namespace

TEST_CASE("configuration validation") {
    RopeConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.head_dim = 15;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RopeConfig{};
    cfg.dims_t = 3;  // 3 + 3 + 3 != 8
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RopeConfig{};
    cfg.scale_h = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RopeConfig{};
    cfg.theta_base = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("default axis split covers common head sizes") {
    const RopeConfig d16 = RopeConfig::for_head_dim(16);
    CHECK(d16.dims_t == 2);
    CHECK(d16.dims_h == 3);
    CHECK(d16.dims_w == 3);
    for (int hd : {6, 8, 12, 16, 32, 64, 128}) {
        const RopeConfig cfg = RopeConfig::for_head_dim(hd);
        CHECK(cfg.head_dim == hd);
        CHECK(cfg.dims_t + cfg.dims_h + cfg.dims_w == hd / 2);
        CHECK(cfg.dims_h == cfg.dims_w);
        CHECK_NOTHROW(cfg.validate());
    }
    CHECK_THROWS_AS(RopeConfig::for_head_dim(4), std::invalid_argument);
}

TEST_CASE("rotation at the origin is the identity") {
    RopeConfig cfg;
    CounterRng rng(5, StreamDomain::TestGen, 0);
    const Eigen::VectorXd v = random_vec(rng, cfg.head_dim);
    CHECK((rotate_3d(v, {0, 0, 0, 0}, cfg) - v).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rotate_1d(v, 0, cfg) - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotation preserves vector norms") {
    RopeConfig cfg;
    CounterRng rng(6, StreamDomain::TestGen, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::VectorXd v = random_vec(rng, cfg.head_dim);
        const Position3D pos = random_pos(rng, 100);
        CHECK(rotate_3d(v, pos, cfg).norm() == doctest::Approx(v.norm()).epsilon(1e-10));
        CHECK(rotate_1d(v, pos.seq, cfg).norm() ==
              doctest::Approx(v.norm()).epsilon(1e-10));
    }
}

TEST_CASE("rotation matches the explicit-matrix oracle") {
    RopeConfig cfg;
    CounterRng rng(7, StreamDomain::TestGen, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::VectorXd v = random_vec(rng, cfg.head_dim);
        const Position3D pos = random_pos(rng, 64);
        const Eigen::VectorXd lib = rotate_3d(v, pos, cfg);
        const Eigen::VectorXd ref = oracle::rotation_matrix(pos, false, cfg) * v;
        CHECK((lib - ref).cwiseAbs().maxCoeff() < 1e-12);

        const Eigen::VectorXd lib1 = rotate_1d(v, pos.seq, cfg);
        const Eigen::VectorXd ref1 = oracle::rotation_matrix(pos, true, cfg) * v;
        CHECK((lib1 - ref1).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("multi-head rotation applies the same angles per head") {
    RopeConfig cfg;
    CounterRng rng(8, StreamDomain::TestGen, 0);
    const int heads = 3;
    const Eigen::VectorXd v = random_vec(rng, heads * cfg.head_dim);
    const Position3D pos = {5, 2, 7, 40};
    const Eigen::VectorXd out = rotate_heads(v, pos, false, cfg, heads);
    for (int h = 0; h < heads; ++h) {
        const Eigen::VectorXd expect =
            rotate_3d(v.segment(h * cfg.head_dim, cfg.head_dim), pos, cfg);
        CHECK((out.segment(h * cfg.head_dim, cfg.head_dim) - expect).cwiseAbs().maxCoeff() ==
              0.0);
    }
    CHECK_THROWS_AS(rotate_heads(v, pos, false, cfg, 2), std::invalid_argument);
}

TEST_CASE("text entries take the sequence path only when configured") {
    RopeConfig cfg;
    CounterRng rng(9, StreamDomain::TestGen, 0);
    const Eigen::VectorXd v = random_vec(rng, cfg.head_dim);
    const Position3D pos = {2, 3, 4, 17};
    CHECK((rotate_entry(v, pos, true, cfg) - rotate_1d(v, pos.seq, cfg))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((rotate_entry(v, pos, false, cfg) - rotate_3d(v, pos, cfg))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    cfg.one_d_for_text = false;
    CHECK((rotate_entry(v, pos, true, cfg) - rotate_3d(v, pos, cfg))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("rebase shifts time and renumbers sequence indices") {
    const std::vector<Position3D> in = {{3, 1, 2, 50}, {4, 0, 0, 51}};
    const auto out = rebase(in, 3, 0);
    REQUIRE(out.size() == 2);
    CHECK(out[0].t == 0);
    CHECK(out[0].h == 1);
    CHECK(out[0].w == 2);
    CHECK(out[0].seq == 0);
    CHECK(out[1].t == 1);
    CHECK(out[1].h == 0);
    CHECK(out[1].w == 0);
    CHECK(out[1].seq == 1);

    const auto offset = rebase(in, 0, 10);
    CHECK(offset[0].seq == 10);
    CHECK(offset[1].seq == 11);
    CHECK(offset[0].t == 3);

    CHECK_THROWS_AS(rebase(in, 4, 0), InvariantViolation);
    CHECK_THROWS_AS(rebase(in, -1, 0), std::invalid_argument);
}

TEST_CASE("relative logits survive a temporal rebase") {
    RopeConfig cfg;
    CounterRng rng(10, StreamDomain::TestGen, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::VectorXd q = random_vec(rng, cfg.head_dim);
        const Eigen::VectorXd k = random_vec(rng, cfg.head_dim);
        Position3D qp = random_pos(rng, 32);
        Position3D kp = random_pos(rng, 32);
        const std::int64_t delta = std::int64_t(rng.next_u32() % 16);
        qp.t += delta;  // keep both shiftable by delta
        kp.t += delta;

        const double before = rotate_3d(q, qp, cfg).dot(rotate_3d(k, kp, cfg));
        Position3D qs = qp, ks = kp;
        qs.t -= delta;
        ks.t -= delta;
        const double after = rotate_3d(q, qs, cfg).dot(rotate_3d(k, ks, cfg));
        worst = std::max(worst, std::abs(before - after));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("spatial blocks are bitwise untouched by a temporal shift") {
    RopeConfig cfg;
    CounterRng rng(11, StreamDomain::TestGen, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::VectorXd v = random_vec(rng, cfg.head_dim);
        Position3D pos = random_pos(rng, 32);
        pos.t += 8;
        Position3D shifted = pos;
        shifted.t -= 5;
        const Eigen::VectorXd a = rotate_3d(v, pos, cfg);
        const Eigen::VectorXd b = rotate_3d(v, shifted, cfg);
        // h and w axis blocks depend only on h and w
        const int spatial_offset = 2 * cfg.dims_t;
        const int spatial_size = 2 * (cfg.dims_h + cfg.dims_w);
        for (int i = 0; i < spatial_size; ++i)
            CHECK(a[spatial_offset + i] == b[spatial_offset + i]);
    }
}
