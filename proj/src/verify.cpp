#include "prospect/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prospect/errors.hpp"
#include "prospect/rng.hpp"

namespace prospect {

namespace probes {

SetContext random_context(std::uint64_t seed, std::uint64_t index, Variant variant) {
    const GaussianStream g(seed, rng_streams::probes);
    auto u = [&](std::uint64_t k) { return g.uniform(index, k); };

    const double t = u(0);
    // Degenerate wealth / volatility / rate-of-return show up ~5% each.
    const double x = u(1) < 0.05 ? 0.0 : 3.0 * u(2);
    const double lambda = u(3) < 0.05 ? 0.0 : 1.5 * u(4);
    const double theta = u(5) < 0.05 ? 0.0 : 1.5 * u(6);
    const double kappa = 1.5 * u(7);
    const double nu = 3.0 * (u(8) - 0.5);
    const double bound = std::max({kappa, lambda, theta, std::abs(nu), 1e-3});

    if (variant == Variant::base) {
        return SetContext::base_values(t, x, Eigen::MatrixXd::Constant(1, 1, kappa),
                                       Eigen::VectorXd::Constant(1, nu), theta, lambda, bound);
    }
    const double rho = 2.0 * (u(9) - 0.5);
    const double rate = theta * u(10);  // keeps theta >= rate >= 0
    return SetContext::extended_values(t, x, kappa, nu, theta, lambda, rho, rate,
                                       std::max(bound, std::abs(rho)));
}

std::pair<double, double> random_coordinates(std::uint64_t seed, std::uint64_t index) {
    const GaussianStream g(seed, rng_streams::probes + 17);
    const double m = g.uniform(index, 0);
    const double l = g.uniform(index, 1) * std::sqrt(m);
    return {l, m};
}

Policy random_policy(std::uint64_t seed, std::uint64_t index, double horizon) {
    const GaussianStream g(seed, rng_streams::probes + 29);
    const double a = g.uniform(index, 0);
    const double b = 0.5 * g.uniform(index, 1);
    const double c = 6.283185307179586 * g.uniform(index, 2);
    const double d = g.uniform(index, 3) - 0.5;
    const double w = 6.283185307179586 / horizon;
    return {"random_policy",
            [a, b, c, d, w](double t, const PathView& y, const PathView&) {
                const double v = a + b * std::sin(w * t + c) + d * std::tanh(y.end_scalar(0));
                return std::min(1.0, std::max(0.0, v));
            }};
}

RelaxedControl random_relaxed(std::uint64_t seed, std::uint64_t index, double horizon) {
    const GaussianStream g(seed, rng_streams::probes + 43);
    const double a = g.uniform(index, 0);
    const double b = 0.5 * g.uniform(index, 1);
    const double c = 6.283185307179586 * g.uniform(index, 2);
    const double frac = g.uniform(index, 3);
    const double w = 6.283185307179586 / horizon;
    auto m_eval = [a, b, c, w](double t, const PathView& y, const PathView&) {
        const double v = a + b * std::sin(w * t + c) + 0.3 * std::tanh(y.end_scalar(0));
        return std::min(1.0, std::max(0.0, v));
    };
    auto l_eval = [m_eval, frac](double t, const PathView& y, const PathView& x) {
        return frac * std::sqrt(m_eval(t, y, x));
    };
    return {"random_relaxed", l_eval, m_eval};
}

}  // namespace probes

double support_function_grid_oracle(const SetContext& ctx, const Eigen::MatrixXd& u,
                                    const Eigen::VectorXd& v, int m_cells, int l_cells) {
    // The set definition makes a affine in m and b affine in l, so the linear
    // functional is k0 + k1 m + k2 l; the coefficients are read off member
    // points rather than from any support-function logic.
    const auto value_of = [&](const ControlSetPoint& p) {
        return p.a.cwiseProduct(u).sum() + p.b.dot(v);
    };
    const double k0 = value_of(make_member(ctx, 0.0, 0.0));
    const double k1 = value_of(make_member(ctx, 0.0, 1.0)) - k0;
    const double k2 = value_of(make_member(ctx, 1.0, 1.0)) - (k0 + k1);

    double best = -std::numeric_limits<double>::infinity();
    for (int im = 0; im <= m_cells; ++im) {
        const double m = static_cast<double>(im) / m_cells;
        const double sq = std::sqrt(m);
        const double base = k0 + k1 * m;
        for (int il = 0; il <= l_cells; ++il) {
            const double l = sq * static_cast<double>(il) / l_cells;
            best = std::max(best, base + k2 * l);
        }
    }
    return best;
}

SuiteResult verify_convexity(const MarketModel& model, int samples, std::uint64_t seed,
                             double tol) {
    SuiteResult res{"convexity", SuiteStatus::pass, ""};
    const GaussianStream g(seed, rng_streams::probes + 7);
    int failures = 0;
    for (int i = 0; i < samples; ++i) {
        const Variant variant =
            (model.variant == Variant::extended || i % 2 == 1) ? Variant::extended
                                                               : Variant::base;
        const SetContext ctx = probes::random_context(seed, static_cast<std::uint64_t>(i),
                                                      variant);
        const auto [l1, m1] = probes::random_coordinates(seed, 2 * static_cast<std::uint64_t>(i));
        const auto [l2, m2] =
            probes::random_coordinates(seed, 2 * static_cast<std::uint64_t>(i) + 1);
        const double mu = g.uniform(static_cast<std::uint64_t>(i), 0);
        const ControlSetPoint p1 = make_member(ctx, l1, m1);
        const ControlSetPoint p2 = make_member(ctx, l2, m2);
        const MembershipResult combo = convexity_witness(ctx, p1, p2, mu, tol);
        if (!combo.inside) {
            ++failures;
            if (failures == 1) {
                std::ostringstream os;
                os << "first failure at sample " << i << ": residual " << combo.residual
                   << ", (l, m) = (" << combo.l << ", " << combo.m << ")";
                res.detail = os.str();
            }
        }
    }
    if (failures > 0) {
        res.status = SuiteStatus::fail;
        res.detail = std::to_string(failures) + "/" + std::to_string(samples) +
                     " convex combinations left the set; " + res.detail;
    } else {
        std::ostringstream os;
        os << samples << " convex combinations stayed inside (tol " << tol << ")";
        res.detail = os.str();
    }
    return res;
}

SuiteResult verify_support_oracle(const MarketModel& model, int probe_count, int grid_cells,
                                  std::uint64_t seed, const SupportFn& under_test) {
    SuiteResult res{"support_function_oracle", SuiteStatus::pass, ""};
    const SupportFn fn = under_test
                             ? under_test
                             : [](const SetContext& c, const Eigen::MatrixXd& u,
                                  const Eigen::VectorXd& v) { return support_function(c, u, v); };
    const GaussianStream g(seed, rng_streams::probes + 11);
    int failures = 0;
    double worst_gap = 0.0;

    for (int i = 0; i < probe_count; ++i) {
        const Variant variant =
            (model.variant == Variant::extended || i % 2 == 1) ? Variant::extended
                                                               : Variant::base;
        SetContext ctx = probes::random_context(seed, 1000000 + static_cast<std::uint64_t>(i),
                                                variant);
        // Force all four sign patterns of (c1, c2): pattern = i mod 4. Signs
        // are driven through u(d,d) and v(d) on a non-degenerate context.
        const Eigen::Index d = ctx.dimension();
        if (ctx.wealth() == 0.0 || ctx.lambda() == 0.0 || ctx.theta() == 0.0) {
            ctx = variant == Variant::base
                      ? SetContext::base_values(ctx.time(), 1.0 + g.uniform(i, 9),
                                                ctx.kappa(), ctx.nu(), 0.5 + g.uniform(i, 10),
                                                0.5 + g.uniform(i, 11), ctx.coefficient_bound() + 2.0)
                      : SetContext::extended_values(
                            ctx.time(), 1.0 + g.uniform(i, 9), ctx.kappa()(0, 0), ctx.nu()(0),
                            0.5 + g.uniform(i, 10), 0.5 + g.uniform(i, 11), ctx.rho(), 0.0,
                            ctx.coefficient_bound() + 2.0);
        }
        Eigen::MatrixXd u(d + 1, d + 1);
        Eigen::VectorXd v(d + 1);
        for (Eigen::Index r = 0; r < d + 1; ++r) {
            v[r] = 2.0 * (g.uniform(i, 20 + static_cast<std::uint64_t>(r)) - 0.5);
            for (Eigen::Index c = 0; c < d + 1; ++c) {
                u(r, c) = 2.0 * (g.uniform(i, 40 + static_cast<std::uint64_t>(r * (d + 1) + c)) -
                                 0.5);
            }
        }
        const int pattern = i % 4;
        u(d, d) = std::abs(u(d, d)) * ((pattern & 1) ? -1.0 : 1.0);
        v(d) = std::abs(v(d)) * ((pattern & 2) ? -1.0 : 1.0);

        const double closed = fn(ctx, u, v);
        const double grid = support_function_grid_oracle(ctx, u, v, grid_cells, grid_cells);

        // Grid resolution allowance: |c1| h for the m axis plus |c2| sqrt(h)
        // for the sqrt kink of the l boundary.
        const double x = ctx.wealth();
        const double c1_mag = 0.5 * ctx.lambda() * ctx.lambda() * x * x *
                              (ctx.variant() == Variant::base
                                   ? std::abs(u(d, d))
                                   : std::abs(ctx.rho() * ctx.rho() * u(0, 0) +
                                              ctx.rho() * (u(0, 1) + u(1, 0)) + u(1, 1)));
        const double c2_mag =
            std::abs(ctx.variant() == Variant::base
                         ? ctx.theta() * x * v(d)
                         : (ctx.theta() - ctx.rate()) * x * (ctx.rho() * v(0) + v(1)));
        const double h = 1.0 / grid_cells;
        const double allowance = 1e-9 + c1_mag * h + c2_mag * std::sqrt(h);

        bool bad = std::abs(closed - grid) > allowance;
        // Domination: the support value upper-bounds every sampled member.
        for (int s = 0; s < 16 && !bad; ++s) {
            const auto [l, m] = probes::random_coordinates(
                seed, 5000000 + 16 * static_cast<std::uint64_t>(i) + s);
            const ControlSetPoint p = make_member(ctx, l, m);
            const double val = p.a.cwiseProduct(u).sum() + p.b.dot(v);
            if (val > closed + 1e-9) bad = true;
        }
        if (bad) {
            ++failures;
            worst_gap = std::max(worst_gap, std::abs(closed - grid));
            if (failures == 1) {
                std::ostringstream os;
                os << "first failure at probe " << i << " (sign pattern " << pattern
                   << "): closed " << closed << " vs grid " << grid;
                res.detail = os.str();
            }
        }
    }
    if (failures > 0) {
        res.status = SuiteStatus::fail;
        std::ostringstream os;
        os << failures << "/" << probe_count << " probes disagree (worst gap " << worst_gap
           << "); " << res.detail;
        res.detail = os.str();
    } else {
        res.detail = std::to_string(probe_count) + " probes match the grid oracle";
    }
    return res;
}

SuiteResult verify_dominance(const MarketModel& model, const Preferences& prefs,
                             const SimulationGrid& grid, Eigen::Index path_count,
                             int control_count, std::uint64_t seed) {
    SuiteResult res{"dominance_transform", SuiteStatus::pass, ""};
    if (model.variant == Variant::extended) {
        res.status = SuiteStatus::unsupported;
        res.detail = "dominance lift is only available on the base variant";
        return res;
    }
    for (int c = 0; c < control_count; ++c) {
        const RelaxedControl control =
            probes::random_relaxed(seed, static_cast<std::uint64_t>(c), grid.horizon);
        const PathBundle bundle = simulate(model, control, grid, path_count,
                                           seed + static_cast<std::uint64_t>(c),
                                           Scheme::exact_exponential);
        const DominanceResult lift = dominance_transform(bundle, model);
        for (Eigen::Index p = 0; p < path_count; ++p) {
            for (Eigen::Index i = 0; i <= grid.steps; ++i) {
                if (lift.z(i, p) < 1.0) {
                    res.status = SuiteStatus::fail;
                    std::ostringstream os;
                    os << "Z < 1 at control " << c << ", path " << p << ", step " << i;
                    res.detail = os.str();
                    return res;
                }
            }
            const double xt = bundle.x(grid.steps, p);
            const double xhat = lift.bundle.x(grid.steps, p);
            if (xhat < xt) {
                res.status = SuiteStatus::fail;
                std::ostringstream os;
                os << "terminal wealth decreased at control " << c << ", path " << p;
                res.detail = os.str();
                return res;
            }
            const double integral = std::log(lift.z(grid.steps, p));
            if (integral > 1e-6 && !(xhat > xt)) {
                res.status = SuiteStatus::fail;
                std::ostringstream os;
                os << "no strict improvement despite positive drift gap at control " << c
                   << ", path " << p;
                res.detail = os.str();
                return res;
            }
        }
        const CptReport before = evaluate(bundle, prefs);
        const CptReport after = evaluate(lift.bundle, prefs);
        if (after.v < before.v) {
            res.status = SuiteStatus::fail;
            std::ostringstream os;
            os << "V decreased under the lift at control " << c << ": " << before.v << " -> "
               << after.v;
            res.detail = os.str();
            return res;
        }
    }
    res.detail = std::to_string(control_count) + " relaxed controls lifted with Z >= 1 and "
                 "V(sqrt(m)) >= V(l, m)";
    return res;
}

SuiteResult verify_moment_bounds(const MarketModel& model, const SimulationGrid& grid,
                                 Eigen::Index path_count, int control_count,
                                 std::uint64_t seed) {
    SuiteResult res{"moment_envelope", SuiteStatus::pass, ""};
    const double exponents[] = {1.0, 2.0, 4.0};
    std::ostringstream detail;
    for (const double m : exponents) {
        std::vector<double> estimates;
        for (int c = 0; c < control_count; ++c) {
            Control control;
            if (c % 2 == 0) {
                control = probes::random_policy(seed, static_cast<std::uint64_t>(c),
                                                grid.horizon);
            } else {
                control = probes::random_relaxed(seed, static_cast<std::uint64_t>(c),
                                                 grid.horizon);
            }
            const PathBundle bundle =
                simulate(model, control, grid, path_count,
                         seed + static_cast<std::uint64_t>(c), Scheme::exact_exponential);
            estimates.push_back(sup_norm_stats(bundle, m).estimate);
        }
        std::vector<double> sorted(estimates);
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        const double max = sorted.back();
        detail << "m=" << m << ": max " << max << ", median " << median << "; ";
        if (!(max < 10.0 * median)) {
            res.status = SuiteStatus::fail;
            res.detail = "exponent " + std::to_string(m) + ": max estimate " +
                         std::to_string(max) + " >= 10 x median " + std::to_string(median);
            return res;
        }
    }
    res.detail = detail.str();
    return res;
}

SuiteResult verify_holder(const MarketModel& model, const SimulationGrid& grid,
                          Eigen::Index path_count, std::uint64_t seed) {
    SuiteResult res{"holder_increments", SuiteStatus::pass, ""};
    std::vector<Eigen::Index> lags;
    for (Eigen::Index lag = 1; lag <= grid.steps / 2; lag *= 2) lags.push_back(lag);
    if (lags.size() < 3) {
        res.status = SuiteStatus::fail;
        res.detail = "grid too coarse for a lag sweep";
        return res;
    }
    const HolderReport report = holder_increment_check(
        model, Policy::constant(0.5), grid, path_count, seed, 2.0, lags);
    if (!report.ok()) {
        res.status = SuiteStatus::fail;
        res.detail = report.violations.front();
        return res;
    }
    std::ostringstream os;
    os << "eta=2 slope " << report.fitted_slope << ", K " << report.implied_constant
       << ", no envelope violations";
    res.detail = os.str();
    return res;
}

std::vector<SuiteResult> run_verify_suites(const MarketModel& model, const Preferences& prefs,
                                           const VerifySettings& settings,
                                           const SimulationGrid& grid, std::uint64_t seed) {
    std::vector<SuiteResult> results;
    results.push_back(verify_convexity(model, settings.convexity_samples, seed,
                                       settings.tolerance));
    results.push_back(verify_support_oracle(model, settings.support_probes,
                                            settings.support_grid, seed));
    results.push_back(verify_dominance(model, prefs, grid, settings.paths,
                                       settings.dominance_controls, seed));
    results.push_back(verify_moment_bounds(model, grid, settings.paths,
                                           settings.moment_controls, seed));
    results.push_back(verify_holder(model, grid, settings.paths, seed));
    return results;
}

}  // namespace prospect
