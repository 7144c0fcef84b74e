#include "prospect/rng.hpp"

#include <cmath>

namespace prospect {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c[0], hi0, lo0);
        mulhilo(kPhiloxM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
    const std::uint64_t k = splitmix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

std::array<std::uint32_t, 4> GaussianStream::raw(std::uint64_t path, std::uint64_t index) const {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
        static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    return Philox4x32::block(counter, key_);
}

double GaussianStream::uniform(std::uint64_t path, std::uint64_t index) const {
    const auto r = raw(path, index);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    return static_cast<double>(a >> 11) * 0x1.0p-53;
}

double GaussianStream::normal(std::uint64_t path, std::uint64_t index) const {
    const auto r = raw(path, index);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    // u1 in (0,1] keeps the log finite; u2 in [0,1).
    const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

void GaussianStream::fill_normals(std::uint64_t path, std::uint64_t first_index, double* out,
                                  std::size_t count) const {
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = normal(path, first_index + i);
    }
}

}  // namespace prospect
