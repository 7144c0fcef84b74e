#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "prospect/rng.hpp"

#include "prospect/market_model.hpp"
#include "prospect/path_engine.hpp"

namespace testutil {

// Constant-coefficient base model; bounds equal the |values| unless padded.
inline prospect::MarketModel constant_model(double theta, double lambda, double nu = 0.0,
                                            double kappa = 0.0, double x0 = 1.0,
                                            double y0 = 0.0, double horizon = 1.0) {
    prospect::MarketModel m;
    m.horizon = horizon;
    m.dimension = 1;
    m.initial_wealth = x0;
    m.initial_factor = Eigen::VectorXd::Constant(1, y0);
    m.theta = prospect::functionals::constant(theta);
    m.lambda = prospect::functionals::constant(lambda);
    m.nu = prospect::functionals::isotropic_vector(prospect::functionals::constant(nu), 1);
    m.kappa = prospect::functionals::isotropic_matrix(prospect::functionals::constant(kappa), 1);
    return m;
}

inline prospect::MarketModel extended_model(double theta, double lambda, double nu,
                                            double kappa, double rho, double rate,
                                            double x0 = 1.0, double y0 = 0.0,
                                            double horizon = 1.0) {
    prospect::MarketModel m = constant_model(theta, lambda, nu, kappa, x0, y0, horizon);
    m.variant = prospect::Variant::extended;
    m.rho = prospect::functionals::constant(rho);
    m.rate = [rate](double) { return rate; };
    m.rate_bound = rate;
    return m;
}

// Row-major (points x dim) trajectory with y_i = f(t_i).
template <class F>
prospect::RowMajorMatrix sampled_path(F f, Eigen::Index points, double dt) {
    prospect::RowMajorMatrix out(points, 1);
    for (Eigen::Index i = 0; i < points; ++i) out(i, 0) = f(static_cast<double>(i) * dt);
    return out;
}

inline double total_brownian_increment(std::uint64_t seed, Eigen::Index path,
                                       Eigen::Index steps, Eigen::Index dim, double dt) {
    // Recomputes the wealth-component Brownian increments the simulator drew.
    const prospect::GaussianStream g(seed, prospect::rng_streams::simulation);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < steps; ++i) {
        acc += std::sqrt(dt) * g.normal(static_cast<std::uint64_t>(path),
                                        static_cast<std::uint64_t>(i) *
                                                static_cast<std::uint64_t>(dim + 1) +
                                            static_cast<std::uint64_t>(dim));
    }
    return acc;
}

}  // namespace testutil
