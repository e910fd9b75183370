#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace packcache {

// Philox4x32-10 counter-based generator. Stateless block function: the
// same (counter, key) pair always yields the same 128-bit block, on every
// platform, which is what makes traces reproducible across languages.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Algorithm identifier accepted in configs.
inline constexpr const char* kPhiloxId = "philox4x32-10";

// Independent sub-streams are addressed by (domain, stream); the block
// index within a stream advances as values are drawn. Splitting is
// therefore free: construct a new CounterRng with a fresh (domain, stream).
enum class StreamDomain : std::uint32_t {
    AnchorFeatures = 1,
    FrameFeatures = 2,
    FrameMask = 3,
    Direction = 4,
    TestGen = 100,
};

class CounterRng {
public:
    CounterRng(std::uint64_t seed, StreamDomain domain, std::uint32_t stream);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // [0, 1), 53-bit resolution.
    double uniform();

    // Standard normal via Box-Muller; consumes two uniforms per draw.
    double normal();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_;
    std::uint32_t domain_;
    std::uint64_t index_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int block_pos_ = 4;
};

}  // namespace packcache
