#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "prospect/errors.hpp"
#include "prospect/market_model.hpp"

using namespace prospect;
using namespace testutil;

TEST_CASE("validate_model: constant coefficients within bounds pass") {
    MarketModel m = constant_model(0.05, 0.2, 0.0, 0.3);
    const ValidationReport report = validate_model(m, 64, 1);
    CHECK(report.ok());
    CHECK(report.probe_count == 64);
}

TEST_CASE("validate_model: negative theta is flagged on every probe") {
    MarketModel m = constant_model(-0.01, 0.2);
    const ValidationReport report = validate_model(m, 32, 1);
    int nonneg = 0;
    for (const auto& issue : report.issues) {
        if (issue.check == "theta_nonnegative") ++nonneg;
    }
    CHECK(nonneg == 32);
}

TEST_CASE("validate_model: extended variant flags theta below the rate on every probe") {
    MarketModel m = extended_model(0.03, 0.2, 0.0, 0.3, 0.1, 0.05);
    const ValidationReport report = validate_model(m, 32, 1);
    int ordering = 0;
    for (const auto& issue : report.issues) {
        if (issue.check == "theta_dominates_rate") ++ordering;
    }
    CHECK(ordering == 32);
}

TEST_CASE("validate_model: a lying declared bound is caught") {
    MarketModel m = constant_model(0.05, 0.2);
    // Declared bound 0.1 but the functional returns 0.5 everywhere.
    m.lambda = ScalarFunctional("lying", [](double, const PathView&) { return 0.5; }, 0.1);
    const ValidationReport report = validate_model(m, 16, 2);
    CHECK(!report.ok());
    CHECK(report.issues.front().check == "lambda_bound");
}

TEST_CASE("coefficient_at: constants, truncation and running max") {
    MarketModel m = constant_model(0.05, 0.2);
    m.kappa = functionals::isotropic_matrix(functionals::running_max_norm(1.0, 1.0), 1);

    const double dt = 1.0 / 64.0;
    const RowMajorMatrix flat = sampled_path([](double) { return 2.0; }, 65, dt);
    const PathView flat_view(flat.data(), 1, 65, dt);

    CHECK(coefficient_at(m, CoefficientName::theta, 0.37, flat_view)(0, 0) == 0.05);
    // running max of |y| = 2 clamps at the declared cap 1.
    CHECK(coefficient_at(m, CoefficientName::kappa, 0.5, flat_view)(0, 0) == 1.0);

    // Linear path y_s = s: running max over [0, 0.5] is 0.5.
    const RowMajorMatrix lin = sampled_path([](double s) { return s; }, 65, dt);
    const PathView lin_view(lin.data(), 1, 65, dt);
    CHECK(coefficient_at(m, CoefficientName::kappa, 0.5, lin_view)(0, 0) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("coefficient_at: domain and variant errors") {
    MarketModel m = constant_model(0.05, 0.2);
    const double dt = 1.0 / 8.0;
    const RowMajorMatrix path = sampled_path([](double) { return 0.0; }, 9, dt);
    const PathView view(path.data(), 1, 9, dt);
    CHECK_THROWS_AS((void)coefficient_at(m, CoefficientName::theta, 1.5, view),
                    std::domain_error);
    CHECK_THROWS_AS((void)coefficient_at(m, CoefficientName::theta, -0.1, view),
                    std::domain_error);
    CHECK_THROWS_AS((void)coefficient_at(m, CoefficientName::rho, 0.5, view), ModelError);
}

TEST_CASE("non-anticipativity: futures that differ leave evaluations bit-identical") {
    const double dt = 1.0 / 32.0;
    RowMajorMatrix a = sampled_path([](double s) { return std::sin(7.0 * s); }, 33, dt);
    RowMajorMatrix b = a;
    for (Eigen::Index i = 17; i < 33; ++i) b(i, 0) += 10.0;  // diverge after t = 0.5

    const ScalarFunctional funcs[] = {
        functionals::constant(0.3),
        functionals::affine_state(0.1, 0.5, -1.0, 1.0),
        functionals::running_max_norm(1.0, 5.0),
        functionals::state_integral(1.0, -10.0, 10.0),
        functionals::tanh_state(0.2, 0.1, 2.0, 0.0),
    };
    for (const auto& f : funcs) {
        for (const double t : {0.0, 0.25, 0.5}) {
            const PathView va = PathView::truncated(a.data(), 1, 33, dt, t);
            const PathView vb = PathView::truncated(b.data(), 1, 33, dt, t);
            CHECK(f(t, va) == f(t, vb));
        }
    }
}

TEST_CASE("boundedness: built-in functionals respect declared bounds on random probes") {
    const ScalarFunctional funcs[] = {
        functionals::affine_state(0.1, 3.0, -0.4, 0.4),
        functionals::running_max_norm(2.0, 1.5),
        functionals::state_integral(5.0, -2.0, 2.0),
        functionals::tanh_state(0.25, 0.5, 3.0, 0.1),
    };
    const GaussianStream g(11);
    const double dt = 1.0 / 16.0;
    for (int probe = 0; probe < 10000; ++probe) {
        RowMajorMatrix path(17, 1);
        path(0, 0) = 0.0;
        for (Eigen::Index i = 1; i < 17; ++i) {
            path(i, 0) = path(i - 1, 0) + g.normal(probe, static_cast<std::uint64_t>(i));
        }
        const double t = g.uniform(probe, 100);
        const PathView view = PathView::truncated(path.data(), 1, 17, dt, t);
        for (const auto& f : funcs) {
            CHECK(std::abs(f(t, view)) <= f.declared_bound());
        }
    }
}

TEST_CASE("extended ordering: theta - rate stays nonnegative on probes when declared") {
    MarketModel m = extended_model(0.07, 0.2, 0.0, 0.3, 0.1, 0.02);
    const ValidationReport report = validate_model(m, 256, 3);
    CHECK(report.ok());
}

TEST_CASE("interpolated endpoint: truncation between grid points") {
    const double dt = 0.25;
    const RowMajorMatrix lin = sampled_path([](double s) { return 2.0 * s; }, 5, dt);
    const PathView v = PathView::truncated(lin.data(), 1, 5, dt, 0.375);
    CHECK(v.grid_points() == 2);  // grid times 0 and 0.25
    CHECK(v.end_scalar(0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS((void)PathView::truncated(lin.data(), 1, 2, dt, 0.375),
                    std::invalid_argument);
}
