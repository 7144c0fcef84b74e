#pragma once

#include <functional>
#include <string>
#include <vector>

#include "prospect/config.hpp"
#include "prospect/relaxed_geometry.hpp"

namespace prospect {

enum class SuiteStatus { pass, fail, unsupported };

struct SuiteResult {
    std::string name;
    SuiteStatus status = SuiteStatus::pass;
    std::string detail;
};

// Deterministic generators shared by the verify command and the test suites.
namespace probes {

// Random coefficient context; even indices are base-variant, odd extended.
// Degenerate denominators (x = 0, lambda = 0, theta = 0) appear with small
// probability so the indicator conventions stay exercised.
SetContext random_context(std::uint64_t seed, std::uint64_t index, Variant variant);

// Random admissible coordinates: m in [0,1], l = u * sqrt(m).
std::pair<double, double> random_coordinates(std::uint64_t seed, std::uint64_t index);

// Random bounded feedback policy / relaxed control for sweep tests.
Policy random_policy(std::uint64_t seed, std::uint64_t index, double horizon);
RelaxedControl random_relaxed(std::uint64_t seed, std::uint64_t index, double horizon);

}  // namespace probes

// Brute-force support-function value: max of the linear functional over an
// (m, l) grid of member points built by make_member. Independent of the
// closed-form maximisation.
double support_function_grid_oracle(const SetContext& ctx, const Eigen::MatrixXd& u,
                                    const Eigen::VectorXd& v, int m_cells, int l_cells);

using SupportFn =
    std::function<double(const SetContext&, const Eigen::MatrixXd&, const Eigen::VectorXd&)>;

// Convex combinations of random member points stay members.
SuiteResult verify_convexity(const MarketModel& model, int samples, std::uint64_t seed,
                             double tol);

// Closed form vs grid oracle on probes covering all (c1, c2) sign patterns,
// plus domination of sampled members. `under_test` defaults to
// support_function and exists so a faulty implementation can be injected.
SuiteResult verify_support_oracle(const MarketModel& model, int probe_count, int grid_cells,
                                  std::uint64_t seed, const SupportFn& under_test = {});

// Dominance lift on random relaxed controls: Z >= 1, terminal improvement,
// and V(sqrt(m)) >= V(l, m) under shared seeds. Reports `unsupported` on the
// extended variant.
SuiteResult verify_dominance(const MarketModel& model, const Preferences& prefs,
                             const SimulationGrid& grid, Eigen::Index path_count,
                             int control_count, std::uint64_t seed);

// Sup-norm moment estimates across random controls stay under a common
// envelope (max < 10 x median per exponent).
SuiteResult verify_moment_bounds(const MarketModel& model, const SimulationGrid& grid,
                                 Eigen::Index path_count, int control_count,
                                 std::uint64_t seed);

// Increment moments respect the K |t-s|^{eta/2} envelope implied by the
// largest lag.
SuiteResult verify_holder(const MarketModel& model, const SimulationGrid& grid,
                          Eigen::Index path_count, std::uint64_t seed);

std::vector<SuiteResult> run_verify_suites(const MarketModel& model, const Preferences& prefs,
                                           const VerifySettings& settings,
                                           const SimulationGrid& grid, std::uint64_t seed);

}  // namespace prospect
