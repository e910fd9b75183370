#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "packcache/rng.hpp"

using namespace packcache;

// Published test vectors for the 10-round function.
TEST_CASE("philox block function known answers") {
    SUBCASE("zero counter, zero key") {
        const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    SUBCASE("all-ones counter and key") {
        const auto out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                    {0xffffffffu, 0xffffffffu});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    SUBCASE("pi digits") {
        const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                    {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("block function is a pure function of its inputs") {
    const std::array<std::uint32_t, 4> ctr = {17, 0, 3, 1};
    const std::array<std::uint32_t, 2> key = {42, 7};
    CHECK(philox4x32(ctr, key) == philox4x32(ctr, key));
    CHECK(philox4x32(ctr, key) != philox4x32({18, 0, 3, 1}, key));
    CHECK(philox4x32(ctr, key) != philox4x32(ctr, {43, 7}));
}

TEST_CASE("stream determinism and replay") {
    CounterRng a(123, StreamDomain::TestGen, 5);
    std::vector<std::uint64_t> first;
    for (int i = 0; i < 100; ++i) first.push_back(a.next_u64());
    CounterRng b(123, StreamDomain::TestGen, 5);
    for (int i = 0; i < 100; ++i) CHECK(b.next_u64() == first[std::size_t(i)]);
}

TEST_CASE("distinct seeds, domains, and streams give distinct sequences") {
    auto take = [](CounterRng rng) {
        std::vector<std::uint32_t> v;
        for (int i = 0; i < 16; ++i) v.push_back(rng.next_u32());
        return v;
    };
    const auto base = take(CounterRng(1, StreamDomain::TestGen, 0));
    CHECK(base != take(CounterRng(2, StreamDomain::TestGen, 0)));
    CHECK(base != take(CounterRng(1, StreamDomain::FrameMask, 0)));
    CHECK(base != take(CounterRng(1, StreamDomain::TestGen, 1)));
}

TEST_CASE("uniform stays in [0, 1) and fills the range") {
    CounterRng rng(7, StreamDomain::TestGen, 0);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.001);
    CHECK(hi > 0.999);
}

TEST_CASE("uniform moments match a flat distribution") {
    CounterRng rng(11, StreamDomain::TestGen, 0);
    const int n = 200000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    // exact: mean 1/2, variance 1/12; standard error ~ 0.29 / sqrt(n)
    CHECK(std::abs(mean - 0.5) < 0.005);
    CHECK(std::abs(var - 1.0 / 12.0) < 0.005);
}

TEST_CASE("normal moments match a standard gaussian") {
    CounterRng rng(13, StreamDomain::TestGen, 0);
    const int n = 200000;
    double sum = 0, sumsq = 0, sumcube = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        CHECK(std::isfinite(x));
        sum += x;
        sumsq += x * x;
        sumcube += x * x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
    CHECK(std::abs(sumcube / n) < 0.05);  // symmetric
}

TEST_CASE("u32 bit balance") {
    CounterRng rng(17, StreamDomain::TestGen, 0);
    const int n = 50000;
    std::array<int, 32> ones{};
    for (int i = 0; i < n; ++i) {
        const std::uint32_t v = rng.next_u32();
        for (int b = 0; b < 32; ++b) ones[std::size_t(b)] += (v >> b) & 1u;
    }
    for (int b = 0; b < 32; ++b) {
        const double rate = double(ones[std::size_t(b)]) / n;
        CHECK(rate > 0.48);
        CHECK(rate < 0.52);
    }
}

TEST_CASE("algorithm identifier names the ten-round variant") {
    CHECK(std::string(kPhiloxId) == "philox4x32-10");
}
