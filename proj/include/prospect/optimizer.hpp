#pragma once

#include <cstdint>
#include <vector>

#include "prospect/cpt.hpp"

namespace prospect {

enum class FamilyKind { constant, piecewise_constant_time, feedback_grid };

// Parametrised feedback-policy family. Every parameter lives in [0,1] after
// clamping, so boundary policies (phi = 0 and phi = 1) are exactly
// representable; the riskless policy must be reachable.
class PolicyFamily {
public:
    static PolicyFamily constant();
    static PolicyFamily piecewise_constant_time(Eigen::Index segments, double horizon);
    // Bins (t, y_t[0]) on a time-segment x y-quantile grid; edges must be
    // strictly increasing.
    static PolicyFamily feedback_grid(Eigen::Index time_segments, double horizon,
                                      std::vector<double> y_bin_edges);
    // Derives the y-bin edges from the quantiles of a pilot simulation under
    // the riskless policy.
    static PolicyFamily feedback_from_pilot(const MarketModel& model,
                                            const SimulationGrid& grid,
                                            Eigen::Index pilot_paths, std::uint64_t seed,
                                            Eigen::Index time_segments,
                                            Eigen::Index y_bins = 8);

    FamilyKind kind() const { return kind_; }
    Eigen::Index parameter_count() const { return parameter_count_; }
    Policy instantiate(const Eigen::VectorXd& parameters) const;

private:
    FamilyKind kind_ = FamilyKind::constant;
    Eigen::Index parameter_count_ = 1;
    Eigen::Index time_segments_ = 1;
    double horizon_ = 1.0;
    std::vector<double> y_bin_edges_;
};

struct TraceRow {
    Eigen::Index iteration = 0;   // evaluation index
    double value = 0.0;           // candidate objective
    double se = 0.0;              // bootstrap SE of the candidate value
    double incumbent = 0.0;       // best-so-far objective (non-decreasing)
    Eigen::VectorXd parameters;
};

struct OptimizationResult {
    Eigen::VectorXd best_parameters;
    CptReport best_value;
    std::vector<TraceRow> trace;
    Eigen::Index evaluations = 0;
    std::uint64_t seed = 0;
};

enum class Method { grid_refine, nelder_mead, cross_entropy };

// Instantiates the policy, simulates with the given seed and evaluates the
// CPT objective. Deterministic in (parameters, seed): every evaluation in an
// optimisation run shares one seed (common random numbers), which turns the
// noisy objective into a deterministic function of the parameters.
CptReport evaluate_policy(const PolicyFamily& family, const Eigen::VectorXd& parameters,
                          const MarketModel& model, const Preferences& prefs,
                          const SimulationGrid& grid, Eigen::Index path_count,
                          std::uint64_t seed, int threads = 1);

// Derivative-free search over the family box. budget counts objective
// evaluations (simulations); exhausting it returns the incumbent. A
// non-finite objective aborts with NumericalError.
OptimizationResult optimize(const PolicyFamily& family, const MarketModel& model,
                            const Preferences& prefs, const SimulationGrid& grid,
                            Eigen::Index path_count, std::uint64_t seed, Eigen::Index budget,
                            Method method, int threads = 1);

}  // namespace prospect
