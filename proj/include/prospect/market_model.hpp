#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "prospect/functionals.hpp"

namespace prospect {

enum class Variant { base, extended };

// Incomplete diffusion market on [0, horizon]:
//   dY = nu(t, Y.) dt + kappa(t, Y.) dB          (factor, d-dimensional)
//   dX = phi theta(t, Y.) X dt + phi lambda(t, Y.) X dW   (wealth)
// with B, W independent. The extended variant feeds the wealth back into the
// factor, dY += rho(t, X.) dX, and adds a riskless rate r(t):
//   dX = [phi (theta - r) + r] X dt + phi lambda X dW.
struct MarketModel {
    double horizon = 1.0;
    Eigen::Index dimension = 1;

    VectorFunctional nu;      // drift of Y, values in R^d
    MatrixFunctional kappa;   // diffusion of Y, symmetric PSD d x d
    ScalarFunctional theta;   // risky growth rate, must be >= 0
    ScalarFunctional lambda;  // risky volatility

    double initial_wealth = 1.0;
    Eigen::VectorXd initial_factor;

    Variant variant = Variant::base;
    ScalarFunctional rho;                 // extended only; functional of the X path
    std::function<double(double)> rate;   // extended only; deterministic r(t) >= 0
    double rate_bound = 0.0;

    // Uniqueness in law of the factor equation is a user declaration with no
    // runtime check; it is undecidable numerically.
    bool uniqueness_in_law = true;

    // M = max of the declared bounds of kappa, lambda, theta, nu.
    double coefficient_bound() const;
    // Extended variant: max over all five coefficients and the rate.
    double extended_coefficient_bound() const;

    // Throws ModelError on structural problems (missing functionals, x <= 0,
    // dimension mismatch, extended fields on a base model, ...).
    void require_valid_shape() const;
};

enum class CoefficientName { nu, kappa, theta, lambda, rho };

// Evaluates the named coefficient on the path truncated to [0, t]. Returns a
// d x 1 matrix for nu, d x d for kappa and 1 x 1 for the scalars. The `path`
// must cover [0, t]; anything it contains beyond t cannot influence the
// result. Throws std::domain_error for t outside [0, horizon] and ModelError
// when rho is requested on a base-variant model.
Eigen::MatrixXd coefficient_at(const MarketModel& model, CoefficientName name, double t,
                               const PathView& path);

struct ValidationIssue {
    std::string check;    // which contract failed
    int probe = 0;        // probe index
    double t = 0.0;       // probe time
    double value = 0.0;   // offending value
    double limit = 0.0;   // bound it was compared against
    std::string message;
};

struct ValidationReport {
    int probe_count = 0;
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

// Samples random (t, trajectory) probes and reports every theta < 0
// violation, every |coefficient| > declared_bound violation and, on the
// extended variant, every theta < rate violation. Violations are report
// entries, never exceptions.
ValidationReport validate_model(const MarketModel& model, int probe_count,
                                std::uint64_t rng_seed);

}  // namespace prospect
