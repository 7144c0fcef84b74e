#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "prospect/controls.hpp"
#include "prospect/market_model.hpp"

namespace prospect {

// Uniform time grid t_i = i * horizon / steps, i = 0..steps.
struct SimulationGrid {
    Eigen::Index steps = 0;   // N
    double horizon = 0.0;     // T

    double dt() const { return horizon / static_cast<double>(steps); }
    double time(Eigen::Index i) const {
        return i == steps ? horizon : static_cast<double>(i) * dt();
    }
    void require_valid() const;
};

enum class Scheme { euler, exact_exponential };
enum class ControlKind { policy, relaxed };

// A set of simulated joint (Y, X) trajectories. Column p holds path p:
// x is (N+1) x paths, y is ((N+1)*d) x paths with step-major layout, so each
// path is contiguous and can be viewed through PathView without copying.
// Bundles are immutable after construction and safe to share across threads.
struct PathBundle {
    SimulationGrid grid;
    Eigen::Index dimension = 1;
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::exact_exponential;
    ControlKind control_kind = ControlKind::policy;
    std::shared_ptr<const MarketModel> model;
    std::shared_ptr<const Control> control;

    Eigen::Index path_count() const { return x.cols(); }
    double x_at(Eigen::Index path, Eigen::Index step) const { return x(step, path); }
    double y_at(Eigen::Index path, Eigen::Index step, Eigen::Index comp = 0) const {
        return y(step * dimension + comp, path);
    }

    // Trajectory views covering grid points 0..last_step.
    PathView x_view(Eigen::Index path, Eigen::Index last_step) const {
        return {x.col(path).data(), 1, last_step + 1, grid.dt()};
    }
    PathView y_view(Eigen::Index path, Eigen::Index last_step) const {
        return {y.col(path).data(), dimension, last_step + 1, grid.dt()};
    }

    Eigen::VectorXd terminal_wealth() const { return x.row(grid.steps).transpose(); }
};

namespace detail {

// Standard-normal draws for (path, step): fills out[0..d] with the d factor
// components followed by the wealth component. Must be a pure function of
// its arguments so that results are schedule-independent.
using NoiseFn = std::function<void(Eigen::Index path, Eigen::Index step, double* out)>;

PathBundle simulate_with_noise(const MarketModel& model, const Control& control,
                               const SimulationGrid& grid, Eigen::Index path_count,
                               std::uint64_t recorded_seed, Scheme scheme,
                               const NoiseFn& noise, int threads = 1);

}  // namespace detail

// Simulates `path_count` joint trajectories. Y follows Euler-Maruyama; X
// follows the chosen scheme with left-endpoint coefficient evaluation
// (exact_exponential applies the stochastic-exponential closed form step by
// step and keeps X strictly positive). Brownian increments come from
// counter-based substreams of `seed`, so path i's noise does not depend on
// path_count, scheduling or thread count.
PathBundle simulate(const MarketModel& model, const Control& control,
                    const SimulationGrid& grid, Eigen::Index path_count, std::uint64_t seed,
                    Scheme scheme, int threads = 1);

// Re-simulates under the identical Brownian increment stream (common random
// numbers). On the base variant the Y paths are bit-identical to the input
// bundle's, since Y is autonomous.
PathBundle resample_with_crn(const PathBundle& bundle, const Control& new_control,
                             int threads = 1);

struct MomentReport {
    double exponent = 0.0;
    double estimate = 0.0;
    double standard_error = 0.0;
    Eigen::Index path_count = 0;
};

// Monte-Carlo estimate of E[ sup_{t<=T} |zeta_t|^m ] with zeta = (Y, X) and
// the sup taken over grid points.
MomentReport sup_norm_stats(const PathBundle& bundle, double exponent);

struct HolderLag {
    Eigen::Index lag_steps = 0;
    double lag_time = 0.0;
    double moment = 0.0;
    double standard_error = 0.0;
};

struct HolderReport {
    double eta = 0.0;
    std::vector<HolderLag> lags;
    double fitted_slope = 0.0;     // slope of log moment vs log lag
    double implied_constant = 0.0; // K from the largest lag
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

// Estimates E|zeta_t - zeta_s|^eta for each step lag, fits the log-log slope
// and checks the increments against K |t-s|^{eta/2} with K implied by the
// largest lag. Violation = exceeding that envelope by more than 3 SEs.
HolderReport holder_increment_check(const MarketModel& model, const Control& control,
                                    const SimulationGrid& grid, Eigen::Index path_count,
                                    std::uint64_t seed, double eta,
                                    const std::vector<Eigen::Index>& lag_set,
                                    int threads = 1);

}  // namespace prospect
