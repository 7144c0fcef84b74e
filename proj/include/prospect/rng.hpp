#pragma once

#include <array>
#include <cstdint>

namespace prospect {

// Philox 4x32-10 counter-based generator. Every draw is addressed by a
// (key, counter) pair, so any (path, index) cell of the random field can be
// produced without generating its predecessors. This makes simulations
// independent of path count, worker count and scheduling.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key);
};

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic stream of N(0,1) / U[0,1) variates indexed by (path, index).
// Distinct `stream` tags give statistically independent fields for the same
// master seed (simulation noise, bootstrap, probes, ... never collide).
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed, std::uint64_t stream = 0);

    // U[0,1) and U(0,1]; both deterministic in (path, index).
    double uniform(std::uint64_t path, std::uint64_t index) const;

    // Standard normal via Box-Muller (cosine branch); one Philox block per draw.
    double normal(std::uint64_t path, std::uint64_t index) const;

    void fill_normals(std::uint64_t path, std::uint64_t first_index, double* out,
                      std::size_t count) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::array<std::uint32_t, 4> raw(std::uint64_t path, std::uint64_t index) const;

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::array<std::uint32_t, 2> key_{};
};

// Stream tags used across the engine; listed here so they cannot collide.
namespace rng_streams {
inline constexpr std::uint64_t simulation = 0;
inline constexpr std::uint64_t bootstrap = 1;
inline constexpr std::uint64_t probes = 2;
inline constexpr std::uint64_t optimizer = 3;
}  // namespace rng_streams

}  // namespace prospect
