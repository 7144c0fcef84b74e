#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "prospect/errors.hpp"
#include "prospect/relaxed_geometry.hpp"
#include "prospect/rng.hpp"
#include "prospect/verify.hpp"

using namespace prospect;
using namespace testutil;

namespace {

SetContext simple_base(double theta = 0.8, double lambda = 0.6, double x = 1.5,
                       double kappa = 0.4, double nu = 0.2) {
    return SetContext::base_values(0.3, x, Eigen::MatrixXd::Constant(1, 1, kappa),
                                   Eigen::VectorXd::Constant(1, nu), theta, lambda,
                                   std::max({theta, lambda, kappa, std::abs(nu)}));
}

}  // namespace

TEST_CASE("membership: ordinary strategy phi = 0.5 sits inside with l = sqrt(m)") {
    const SetContext ctx = simple_base();
    const ControlSetPoint p = make_member(ctx, 0.5, 0.25);
    const MembershipResult r = membership(ctx, p);
    CHECK(r.inside);
    CHECK(r.m == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.l == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.residual <= 1e-12);
}

TEST_CASE("membership: l above sqrt(m) is rejected on the constraint") {
    const SetContext ctx = simple_base();
    const MembershipResult r = membership(ctx, make_member(ctx, 0.6, 0.25));
    CHECK(!r.inside);
    CHECK(r.l == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.residual <= 1e-12);  // structure is fine, the box is not
}

TEST_CASE("membership: drift block mismatch shows up as the residual") {
    const SetContext ctx = simple_base();
    ControlSetPoint p = make_member(ctx, 0.5, 0.25);
    p.b(0) += 1.0;  // nu block off by one
    const MembershipResult r = membership(ctx, p);
    CHECK(!r.inside);
    CHECK(r.residual == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("membership: zero denominators follow the indicator convention") {
    SUBCASE("lambda x = 0 reports m = 0 but stays a member for any l <= 1") {
        const SetContext ctx = simple_base(0.8, 0.0, 1.5);
        ControlSetPoint p = make_member(ctx, 0.5, 0.25);
        CHECK(p.a(1, 1) == 0.0);
        const MembershipResult r = membership(ctx, p);
        CHECK(r.m == 0.0);
        // The point is realized by any m in [l^2, 1]; it is a member.
        CHECK(r.inside);
        CHECK(membership(ctx, make_member(ctx, 0.0, 0.7)).inside);
        // But an l beyond sqrt(1) can never be realized.
        ControlSetPoint q = p;
        q.b(1) = 1.2 * ctx.theta() * ctx.wealth();
        CHECK(!membership(ctx, q).inside);
    }
    SUBCASE("theta x = 0 forces l = 0") {
        const SetContext ctx = simple_base(0.0, 0.6, 1.5);
        const MembershipResult r = membership(ctx, make_member(ctx, 0.4, 0.25));
        CHECK(r.l == 0.0);
        CHECK(r.inside);  // b(1) = 0 either way
    }
    SUBCASE("x = 0 degenerates both coordinates") {
        const SetContext ctx = simple_base(0.8, 0.6, 0.0);
        const MembershipResult r = membership(ctx, make_member(ctx, 0.4, 0.25));
        CHECK(r.l == 0.0);
        CHECK(r.m == 0.0);
        CHECK(r.inside);
    }
}

TEST_CASE("membership: garbage matrices fail PSD and structure checks") {
    const SetContext ctx = simple_base();
    ControlSetPoint p;
    p.a = -Eigen::MatrixXd::Identity(2, 2);
    p.b = Eigen::VectorXd::Zero(2);
    CHECK(!membership(ctx, p).inside);
    p.a = Eigen::MatrixXd::Zero(3, 3);
    p.b = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS((void)membership(ctx, p), std::invalid_argument);
}

TEST_CASE("membership round-trip: coordinates recover within 1e-12") {
    for (int i = 0; i < 2000; ++i) {
        const Variant variant = i % 2 == 0 ? Variant::base : Variant::extended;
        const SetContext ctx = probes::random_context(51, static_cast<std::uint64_t>(i),
                                                      variant);
        const auto [l, m] = probes::random_coordinates(51, static_cast<std::uint64_t>(i));
        const MembershipResult r = membership(ctx, make_member(ctx, l, m), 1e-9);
        CHECK(r.inside);
        CHECK(r.residual <= 1e-12);
        // Non-degenerate contexts recover the exact coordinates.
        if (ctx.wealth() != 0.0 && ctx.lambda() != 0.0 &&
            (ctx.theta() - ctx.rate()) != 0.0) {
            CHECK(r.m == doctest::Approx(m).epsilon(1e-12));
            CHECK(r.l == doctest::Approx(l).epsilon(1e-12));
        }
    }
}

TEST_CASE("extended membership: rho coupling and rate shift are part of the structure") {
    const SetContext ctx = SetContext::extended_values(0.2, 1.5, 0.4, 0.2, 0.8, 0.6, -0.7,
                                                       0.1, 1.0);
    const ControlSetPoint p = make_member(ctx, 0.3, 0.5);
    // Off-diagonal of a carries rho, drift carries the rate shift.
    CHECK(p.a(0, 1) == doctest::Approx(0.5 * 0.5 * 0.36 * 1.5 * 1.5 * -0.7).epsilon(1e-12));
    CHECK(p.b(1) == doctest::Approx(0.3 * 1.5 * (0.8 - 0.1) + 0.1 * 1.5).epsilon(1e-12));
    const MembershipResult r = membership(ctx, p);
    CHECK(r.inside);
    CHECK(r.m == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.l == doctest::Approx(0.3).epsilon(1e-12));

    ControlSetPoint q = p;
    q.a(0, 1) = 0.0;  // break the rank-one coupling
    CHECK(!membership(ctx, q).inside);
}

TEST_CASE("support_function: closed-form candidates") {
    // kappa = nu = 0 kills the fixed part; theta = lambda = x = 1.
    const SetContext ctx = SetContext::base_values(0.0, 1.0, Eigen::MatrixXd::Zero(1, 1),
                                                   Eigen::VectorXd::Zero(1), 1.0, 1.0, 1.0);
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, 2);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2);

    SUBCASE("c1 = 0, c2 = 1: linear in l, maximised at (1,1)") {
        v(1) = 1.0;
        CHECK(support_function(ctx, u, v) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("c1 = -1, c2 = 1: interior stationary point value 1/4") {
        u(1, 1) = -2.0;  // c1 = 0.5 * u11 = -1
        v(1) = 1.0;
        CHECK(support_function(ctx, u, v) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("c1 = -2, c2 = 1: maximum 1/8 at m = 1/16") {
        u(1, 1) = -4.0;
        v(1) = 1.0;
        CHECK(support_function(ctx, u, v) == doctest::Approx(0.125).epsilon(1e-12));
    }
    SUBCASE("c2 <= 0: l = 0 and the m vertex decides") {
        u(1, 1) = 3.0;  // c1 = 1.5
        v(1) = -2.0;
        CHECK(support_function(ctx, u, v) == doctest::Approx(1.5).epsilon(1e-15));
        u(1, 1) = -3.0;
        CHECK(support_function(ctx, u, v) == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("support_function: grid oracle and member domination on random probes") {
    const GaussianStream g(61);
    for (int i = 0; i < 60; ++i) {
        const Variant variant = i % 2 == 0 ? Variant::base : Variant::extended;
        const SetContext ctx = probes::random_context(61, static_cast<std::uint64_t>(i),
                                                      variant);
        Eigen::MatrixXd u(2, 2);
        Eigen::VectorXd v(2);
        for (int r = 0; r < 2; ++r) {
            v[r] = 4.0 * (g.uniform(i, 10 + r) - 0.5);
            for (int c = 0; c < 2; ++c) u(r, c) = 4.0 * (g.uniform(i, 20 + 2 * r + c) - 0.5);
        }
        const double closed = support_function(ctx, u, v);
        const double grid = support_function_grid_oracle(ctx, u, v, 400, 400);
        CHECK(closed >= grid - 1e-9);
        for (int s = 0; s < 32; ++s) {
            const auto [l, m] =
                probes::random_coordinates(61, 100 + 32 * static_cast<std::uint64_t>(i) + s);
            const ControlSetPoint p = make_member(ctx, l, m);
            CHECK(p.a.cwiseProduct(u).sum() + p.b.dot(v) <= closed + 1e-9);
        }
    }
}

TEST_CASE("support_function is convex in (u, v)") {
    const GaussianStream g(67);
    const SetContext ctx = simple_base();
    for (int i = 0; i < 500; ++i) {
        Eigen::MatrixXd u1(2, 2), u2(2, 2);
        Eigen::VectorXd v1(2), v2(2);
        for (int r = 0; r < 2; ++r) {
            v1[r] = 4.0 * (g.uniform(i, r) - 0.5);
            v2[r] = 4.0 * (g.uniform(i, 4 + r) - 0.5);
            for (int c = 0; c < 2; ++c) {
                u1(r, c) = 4.0 * (g.uniform(i, 8 + 2 * r + c) - 0.5);
                u2(r, c) = 4.0 * (g.uniform(i, 16 + 2 * r + c) - 0.5);
            }
        }
        const double lam = g.uniform(i, 99);
        const double lhs = support_function(ctx, lam * u1 + (1.0 - lam) * u2,
                                            lam * v1 + (1.0 - lam) * v2);
        const double rhs = lam * support_function(ctx, u1, v1) +
                           (1.0 - lam) * support_function(ctx, u2, v2);
        CHECK(lhs <= rhs + 1e-10);
    }
}

TEST_CASE("convexity_witness: endpoints, midpoint and precondition") {
    const SetContext ctx = simple_base();
    const ControlSetPoint p1 = make_member(ctx, 1.0, 1.0);
    const ControlSetPoint p2 = make_member(ctx, 0.0, 0.0);

    const MembershipResult same = convexity_witness(ctx, p1, p1, 0.37);
    CHECK(same.inside);
    CHECK(same.l == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(same.m == doctest::Approx(1.0).epsilon(1e-12));

    const MembershipResult mid = convexity_witness(ctx, p1, p2, 0.5);
    CHECK(mid.inside);
    CHECK(mid.m == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.l == doctest::Approx(0.5).epsilon(1e-12));  // 0.5 <= sqrt(0.5)

    const MembershipResult endpoint = convexity_witness(ctx, p1, p2, 0.0);
    CHECK(endpoint.inside);
    CHECK(endpoint.m == doctest::Approx(0.0).epsilon(1e-12));

    const ControlSetPoint bad = make_member(ctx, 0.9, 0.25);
    CHECK_THROWS_AS((void)convexity_witness(ctx, bad, p2, 0.5), std::invalid_argument);
}

TEST_CASE("convexity: random combinations stay inside at 1e-10") {
    const GaussianStream g(71);
    for (int i = 0; i < 2000; ++i) {
        const Variant variant = i % 2 == 0 ? Variant::base : Variant::extended;
        const SetContext ctx = probes::random_context(71, static_cast<std::uint64_t>(i),
                                                      variant);
        const auto [l1, m1] = probes::random_coordinates(71, 2 * static_cast<std::uint64_t>(i));
        const auto [l2, m2] =
            probes::random_coordinates(71, 2 * static_cast<std::uint64_t>(i) + 1);
        const double mu = g.uniform(i, 0);
        const MembershipResult r = convexity_witness(ctx, make_member(ctx, l1, m1),
                                                     make_member(ctx, l2, m2), mu, 1e-10);
        CHECK(r.inside);
    }
}

TEST_CASE("norm_bound: closed values and member coverage") {
    SUBCASE("degenerate model: all members are the zero pair") {
        const SetContext ctx = SetContext::base_values(0.0, 0.0, Eigen::MatrixXd::Zero(1, 1),
                                                       Eigen::VectorXd::Zero(1), 0.0, 0.0, 0.0);
        CHECK(norm_bound(ctx) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("M = 1, x = 0 gives 2; M = 1, x = 2 gives 6") {
        const SetContext a = SetContext::base_values(0.0, 0.0, Eigen::MatrixXd::Ones(1, 1),
                                                     Eigen::VectorXd::Ones(1), 1.0, 1.0, 1.0);
        CHECK(norm_bound(a) == doctest::Approx(2.0).epsilon(1e-15));
        const SetContext b = SetContext::base_values(0.0, 2.0, Eigen::MatrixXd::Ones(1, 1),
                                                     Eigen::VectorXd::Ones(1), 1.0, 1.0, 1.0);
        CHECK(norm_bound(b) == doctest::Approx(6.0).epsilon(1e-15));
    }
    SUBCASE("random members never exceed the bound") {
        for (int i = 0; i < 10000; ++i) {
            const Variant variant = i % 2 == 0 ? Variant::base : Variant::extended;
            const SetContext ctx = probes::random_context(73, static_cast<std::uint64_t>(i),
                                                          variant);
            const auto [l, m] = probes::random_coordinates(73, static_cast<std::uint64_t>(i));
            const ControlSetPoint p = make_member(ctx, l, m);
            const double norm = std::sqrt(p.a.squaredNorm() + p.b.squaredNorm());
            CHECK(norm <= norm_bound(ctx) + 1e-12);
        }
    }
}

TEST_CASE("dominance_transform: identity cases") {
    const SimulationGrid grid{64, 1.0};
    SUBCASE("l = sqrt(m) keeps the bundle bit-identical") {
        const MarketModel m = constant_model(0.1, 0.2);
        const PathBundle b = simulate(m, RelaxedControl::constant(0.5, 0.25), grid, 16, 5,
                                      Scheme::exact_exponential);
        const DominanceResult lift = dominance_transform(b, m);
        CHECK((lift.z.array() == 1.0).all());
        CHECK(lift.bundle.x == b.x);
        CHECK(lift.bundle.control_kind == ControlKind::policy);
    }
    SUBCASE("theta = 0 gives Z = 1 for any relaxed control") {
        const MarketModel m = constant_model(0.0, 0.2);
        const PathBundle b = simulate(m, RelaxedControl::constant(0.0, 1.0), grid, 16, 5,
                                      Scheme::exact_exponential);
        const DominanceResult lift = dominance_transform(b, m);
        CHECK((lift.z.array() == 1.0).all());
        CHECK(lift.bundle.x == b.x);
    }
}

TEST_CASE("dominance_transform: constant integrand reproduces exp(0.1) exactly in the limit") {
    const MarketModel m = constant_model(0.1, 0.2);
    const SimulationGrid grid{256, 1.0};
    const PathBundle b = simulate(m, RelaxedControl::constant(0.0, 1.0), grid, 8, 9,
                                  Scheme::exact_exponential);
    const DominanceResult lift = dominance_transform(b, m);
    // (sqrt(m) - l) theta = 0.1 is constant, so left-endpoint quadrature is
    // exact at any N.
    for (Eigen::Index p = 0; p < 8; ++p) {
        CHECK(lift.z(256, p) == doctest::Approx(std::exp(0.1)).epsilon(1e-12));
        CHECK(lift.bundle.x(256, p) >= b.x(256, p));
    }
}

TEST_CASE("dominance_transform: pathwise domination, strictness and re-simulation") {
    const MarketModel m = constant_model(0.08, 0.25, 0.05, 0.3);
    const SimulationGrid grid{128, 1.0};
    const RelaxedControl control = probes::random_relaxed(83, 4, 1.0);
    const PathBundle b = simulate(m, control, grid, 64, 19, Scheme::exact_exponential);
    const DominanceResult lift = dominance_transform(b, m);
    CHECK((lift.z.array() >= 1.0).all());
    for (Eigen::Index p = 0; p < 64; ++p) {
        CHECK(lift.bundle.x(128, p) >= b.x(128, p));
        if (std::log(lift.z(128, p)) > 1e-6) CHECK(lift.bundle.x(128, p) > b.x(128, p));
    }
    // Re-simulating the lifted policy under the same seed reproduces Xhat up
    // to regrouped floating-point products.
    const PathBundle resim = resample_with_crn(lift.bundle, *lift.bundle.control);
    for (Eigen::Index p = 0; p < 64; ++p) {
        CHECK(resim.x(128, p) ==
              doctest::Approx(lift.bundle.x(128, p)).epsilon(1e-11));
    }
}

TEST_CASE("dominance_transform: refusals") {
    const SimulationGrid grid{8, 1.0};
    const MarketModel ext = extended_model(0.07, 0.2, 0.0, 0.3, 0.1, 0.02);
    const PathBundle eb = simulate(ext, RelaxedControl::constant(0.1, 0.5), grid, 4, 3,
                                   Scheme::exact_exponential);
    CHECK_THROWS_AS((void)dominance_transform(eb, ext), UnsupportedError);

    const MarketModel base = constant_model(0.05, 0.2);
    const PathBundle pb = simulate(base, Policy::constant(0.5), grid, 4, 3,
                                   Scheme::exact_exponential);
    CHECK_THROWS_AS((void)dominance_transform(pb, base), std::invalid_argument);
}

TEST_CASE("SetContext::at caches evaluations consistent with coefficient_at") {
    const MarketModel m = constant_model(0.05, 0.2, 0.1, 0.3);
    const SimulationGrid grid{16, 1.0};
    const PathBundle b = simulate(m, Policy::constant(0.7), grid, 2, 23,
                                  Scheme::exact_exponential);
    const PathView yv = b.y_view(0, 16);
    const PathView xv = b.x_view(0, 16);
    const SetContext ctx = SetContext::at(m, 0.5, yv, xv);
    CHECK(ctx.theta() == coefficient_at(m, CoefficientName::theta, 0.5, yv)(0, 0));
    CHECK(ctx.kappa()(0, 0) == coefficient_at(m, CoefficientName::kappa, 0.5, yv)(0, 0));
    CHECK(ctx.wealth() == b.x(8, 0));
    CHECK(ctx.coefficient_bound() == m.coefficient_bound());
}

TEST_CASE("verify suite catches a vertex-only support function") {
    const MarketModel m = constant_model(0.5, 0.6, 0.1, 0.3);
    // Correct implementation passes.
    const SuiteResult good = verify_support_oracle(m, 40, 300, 311);
    CHECK(good.status == SuiteStatus::pass);
    // A faulty closed form that skips the interior stationary point must be
    // caught on the c1 < 0 < c2 probes.
    const SupportFn vertex_only = [](const SetContext& ctx, const Eigen::MatrixXd& u,
                                     const Eigen::VectorXd& v) {
        const Eigen::Index d = ctx.dimension();
        const double x = ctx.wealth();
        double fixed, c1, c2;
        if (ctx.variant() == Variant::base) {
            fixed = (0.5 * ctx.kappa() * ctx.kappa().transpose())
                        .cwiseProduct(u.topLeftCorner(d, d))
                        .sum() +
                    ctx.nu().dot(v.head(d));
            c1 = 0.5 * ctx.lambda() * ctx.lambda() * x * x * u(d, d);
            c2 = ctx.theta() * x * v(d);
        } else {
            const double rho = ctx.rho();
            fixed = 0.5 * ctx.kappa()(0, 0) * ctx.kappa()(0, 0) * u(0, 0) +
                    ctx.nu()(0) * v(0) + ctx.rate() * x * (rho * v(0) + v(1));
            c1 = 0.5 * ctx.lambda() * ctx.lambda() * x * x *
                 (rho * rho * u(0, 0) + rho * (u(0, 1) + u(1, 0)) + u(1, 1));
            c2 = (ctx.theta() - ctx.rate()) * x * (rho * v(0) + v(1));
        }
        return fixed + std::max({0.0, c1, c1 + c2});  // vertices only
    };
    const SuiteResult bad = verify_support_oracle(m, 40, 300, 311, vertex_only);
    CHECK(bad.status == SuiteStatus::fail);
}
