#include "prospect/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prospect/errors.hpp"
#include "prospect/rng.hpp"

namespace prospect {

double MarketModel::coefficient_bound() const {
    return std::max({kappa.declared_bound(), lambda.declared_bound(), theta.declared_bound(),
                     nu.declared_bound()});
}

double MarketModel::extended_coefficient_bound() const {
    double m = coefficient_bound();
    if (variant == Variant::extended) {
        m = std::max({m, rho.declared_bound(), rate_bound});
    }
    return m;
}

void MarketModel::require_valid_shape() const {
    if (!(horizon > 0.0)) throw ModelError("model: horizon must be positive");
    if (dimension < 1) throw ModelError("model: dimension must be >= 1");
    if (!(initial_wealth > 0.0)) throw ModelError("model: initial_wealth must be positive");
    if (initial_factor.size() != dimension) {
        throw ModelError("model: initial_factor length does not match dimension");
    }
    if (!nu.valid() || !kappa.valid() || !theta.valid() || !lambda.valid()) {
        throw ModelError("model: nu, kappa, theta and lambda must all be set");
    }
    if (variant == Variant::extended) {
        if (dimension != 1) {
            throw ModelError("model: the extended variant is one-dimensional");
        }
        if (!rho.valid() || !rate) {
            throw ModelError("model: extended variant requires rho and rate");
        }
    }
}

Eigen::MatrixXd coefficient_at(const MarketModel& model, CoefficientName name, double t,
                               const PathView& path) {
    if (t < 0.0 || t > model.horizon) {
        throw std::domain_error("coefficient_at: t outside [0, horizon]");
    }
    // Re-truncate to [0, t]; extensions of the path beyond t cannot matter.
    const PathView restricted = PathView::truncated(
        path.data(), path.dim(), path.grid_points(), path.step(), t);

    switch (name) {
        case CoefficientName::nu: {
            Eigen::MatrixXd out(model.dimension, 1);
            out.col(0) = model.nu(t, restricted);
            return out;
        }
        case CoefficientName::kappa:
            return model.kappa(t, restricted);
        case CoefficientName::theta:
            return Eigen::MatrixXd::Constant(1, 1, model.theta(t, restricted));
        case CoefficientName::lambda:
            return Eigen::MatrixXd::Constant(1, 1, model.lambda(t, restricted));
        case CoefficientName::rho:
            if (model.variant != Variant::extended) {
                throw ModelError("coefficient_at: rho is only defined on the extended variant");
            }
            return Eigen::MatrixXd::Constant(1, 1, model.rho(t, restricted));
    }
    throw std::logic_error("coefficient_at: unknown coefficient");
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    if (ok()) {
        os << "model validation: " << probe_count << " probes, no violations";
        return os.str();
    }
    os << "model validation: " << issues.size() << " violation(s) in " << probe_count
       << " probes";
    for (const auto& v : issues) {
        os << "\n  [" << v.check << "] probe " << v.probe << " t=" << v.t
           << ": " << v.message;
    }
    return os.str();
}

namespace {

// Random piecewise-linear probe trajectory on a 64-point grid over [0, T].
RowMajorMatrix probe_trajectory(const GaussianStream& g, std::uint64_t probe,
                                const Eigen::VectorXd& start, double horizon,
                                Eigen::Index points, double scale, bool positive) {
    const Eigen::Index d = start.size();
    RowMajorMatrix traj(points, d);
    traj.row(0) = start.transpose();
    const double sdt = std::sqrt(horizon / static_cast<double>(points - 1));
    std::uint64_t idx = 0;
    for (Eigen::Index i = 1; i < points; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) {
            const double step = scale * sdt * g.normal(probe, idx++);
            traj(i, k) = positive ? traj(i - 1, k) * std::exp(step) : traj(i - 1, k) + step;
        }
    }
    return traj;
}

}  // namespace

ValidationReport validate_model(const MarketModel& model, int probe_count,
                                std::uint64_t rng_seed) {
    model.require_valid_shape();
    if (probe_count < 1) throw std::invalid_argument("validate_model: probe_count >= 1");

    ValidationReport report;
    report.probe_count = probe_count;
    const GaussianStream g(rng_seed, rng_streams::probes);
    constexpr Eigen::Index kPoints = 64;
    const double dt = model.horizon / static_cast<double>(kPoints - 1);

    for (int p = 0; p < probe_count; ++p) {
        const std::uint64_t pid = 3 * static_cast<std::uint64_t>(p);
        const RowMajorMatrix y = probe_trajectory(g, pid, model.initial_factor, model.horizon,
                                                  kPoints, 1.0, false);
        const double t = model.horizon * g.uniform(pid + 1, 0);
        const PathView yv = PathView::truncated(&y(0, 0), model.dimension, kPoints, dt, t);

        const auto flag = [&](const std::string& check, double value, double limit,
                              const std::string& msg) {
            report.issues.push_back({check, p, t, value, limit, msg});
        };

        const double th = model.theta(t, yv);
        if (th < 0.0) {
            flag("theta_nonnegative", th, 0.0,
                 "theta(t,y) = " + std::to_string(th) + " violates the non-negative-return "
                 "requirement");
        }
        if (std::abs(th) > model.theta.declared_bound()) {
            flag("theta_bound", th, model.theta.declared_bound(),
                 "|theta| exceeds its declared bound");
        }
        const double la = model.lambda(t, yv);
        if (std::abs(la) > model.lambda.declared_bound()) {
            flag("lambda_bound", la, model.lambda.declared_bound(),
                 "|lambda| exceeds its declared bound");
        }
        const Eigen::VectorXd nu = model.nu(t, yv);
        if (nu.norm() > model.nu.declared_bound()) {
            flag("nu_bound", nu.norm(), model.nu.declared_bound(),
                 "|nu| exceeds its declared bound");
        }
        const Eigen::MatrixXd ka = model.kappa(t, yv);
        const double ka_norm =
            ka.size() == 0 ? 0.0
                           : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                 0.5 * (ka + ka.transpose()))
                                 .eigenvalues()
                                 .cwiseAbs()
                                 .maxCoeff();
        if (ka_norm > model.kappa.declared_bound()) {
            flag("kappa_bound", ka_norm, model.kappa.declared_bound(),
                 "|kappa| exceeds its declared spectral bound");
        }

        if (model.variant == Variant::extended) {
            const double r = model.rate(t);
            if (th < r) {
                flag("theta_dominates_rate", th, r,
                     "theta(t,y) = " + std::to_string(th) + " is below the riskless rate " +
                         std::to_string(r));
            }
            if (r < 0.0) {
                flag("rate_nonnegative", r, 0.0, "rate(t) is negative");
            }
            const RowMajorMatrix x = probe_trajectory(
                g, pid + 2, Eigen::VectorXd::Constant(1, model.initial_wealth), model.horizon,
                kPoints, 0.5, true);
            const PathView xv = PathView::truncated(&x(0, 0), 1, kPoints, dt, t);
            const double rh = model.rho(t, xv);
            if (std::abs(rh) > model.rho.declared_bound()) {
                flag("rho_bound", rh, model.rho.declared_bound(),
                     "|rho| exceeds its declared bound");
            }
        }
    }
    return report;
}

}  // namespace prospect
