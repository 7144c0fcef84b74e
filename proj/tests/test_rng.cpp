#include <doctest.h>

#include <cmath>
#include <vector>

#include "prospect/rng.hpp"

using namespace prospect;

TEST_CASE("philox block is deterministic and key-sensitive") {
    const auto a = Philox4x32::block({1, 2, 3, 4}, {5, 6});
    const auto b = Philox4x32::block({1, 2, 3, 4}, {5, 6});
    CHECK(a == b);
    const auto c = Philox4x32::block({1, 2, 3, 4}, {5, 7});
    CHECK(a != c);
    const auto d = Philox4x32::block({2, 2, 3, 4}, {5, 6});
    CHECK(a != d);
}

TEST_CASE("gaussian stream is addressable: draws do not depend on order or neighbours") {
    const GaussianStream g(42);
    const double direct = g.normal(17, 1234);
    // Reading other cells first changes nothing.
    (void)g.normal(16, 0);
    (void)g.normal(18, 99999);
    CHECK(g.normal(17, 1234) == direct);

    const GaussianStream g2(42);
    CHECK(g2.normal(17, 1234) == direct);

    const GaussianStream other_seed(43);
    CHECK(other_seed.normal(17, 1234) != direct);
    const GaussianStream other_stream(42, 1);
    CHECK(other_stream.normal(17, 1234) != direct);
}

TEST_CASE("uniforms live in [0,1) and normals have the right moments") {
    const GaussianStream g(7);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0, sum3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform(0, static_cast<std::uint64_t>(i));
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double z = g.normal(1, static_cast<std::uint64_t>(i));
        sum += z;
        sumsq += z * z;
        sum3 += z * z * z;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double skew = sum3 / n;
    // 5-sigma bands for n = 2e5.
    CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(skew) < 5.0 * std::sqrt(15.0 / n));
}

TEST_CASE("adjacent paths and adjacent indices are uncorrelated") {
    const GaussianStream g(99);
    const int n = 100000;
    double c_path = 0.0, c_index = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::uint64_t>(i);
        c_path += g.normal(0, k) * g.normal(1, k);
        c_index += g.normal(2, k) * g.normal(2, k + 1);
    }
    CHECK(std::abs(c_path / n) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(c_index / n) < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("fill_normals matches per-index draws") {
    const GaussianStream g(5);
    std::vector<double> buf(8);
    g.fill_normals(3, 40, buf.data(), buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        CHECK(buf[i] == g.normal(3, 40 + i));
    }
}
