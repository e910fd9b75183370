#include "packcache/rng.hpp"

#include <cmath>

namespace packcache {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kBump0 = 0x9E3779B9u;
constexpr std::uint32_t kBump1 = 0xBB67AE85u;

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0],
               std::uint32_t(p1),
               std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
               std::uint32_t(p0)};
        key[0] += kBump0;
        key[1] += kBump1;
    }
    return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, StreamDomain domain, std::uint32_t stream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
      stream_(stream),
      domain_(std::uint32_t(domain)) {}

void CounterRng::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        std::uint32_t(index_), std::uint32_t(index_ >> 32), stream_, domain_};
    block_ = philox4x32(ctr, key_);
    ++index_;
    block_pos_ = 0;
}

std::uint32_t CounterRng::next_u32() {
    if (block_pos_ == 4) refill();
    return block_[block_pos_++];
}

std::uint64_t CounterRng::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double CounterRng::uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
    // 1 - u keeps the log argument strictly positive.
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(kTwoPi * u2);
}

}  // namespace packcache
