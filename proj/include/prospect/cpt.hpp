#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prospect/path_engine.hpp"

namespace prospect {

// Gains/losses utilities u+-: R+ -> R+, continuous, non-decreasing, u(0) = 0,
// with the declared envelope u+(z) <= k_plus (z^alpha + 1).
struct UtilityPair {
    std::function<double(double)> u_plus;
    std::function<double(double)> u_minus;
    double k_plus = 1.0;
    double alpha = 1.0;
};

// Probability distortions w+-: [0,1] -> [0,1], non-decreasing, w(0) = 0,
// w(1) = 1, with the declared envelope w+(p) <= g_plus p^gamma.
struct DistortionPair {
    std::function<double(double)> w_plus;
    std::function<double(double)> w_minus;
    double g_plus = 1.0;
    double gamma = 1.0;
};

// Reference point G = F(Y path), a non-negative functional of the factor
// trajectory, declared to lie in L^{theta_star * gamma}.
struct Benchmark {
    std::function<double(const PathView&)> value;
    double theta_star = 2.0;
    bool constant = false;
    double constant_value = 0.0;
};

struct Preferences {
    UtilityPair utilities;
    DistortionPair distortions;
    Benchmark benchmark;

    // theta_star * gamma > 1 is the well-posedness condition.
    bool well_posed() const { return benchmark.theta_star * distortions.gamma > 1.0; }
};

struct CptReport {
    double v_plus = 0.0;
    double v_minus = 0.0;
    double v = 0.0;             // always v_plus - v_minus, to the last digit
    double se_plus = 0.0;
    double se_minus = 0.0;
    double se_v = 0.0;          // bootstrap SE of the difference (joint resampling)
    double analytic_bound = 0.0;
    double terminal_moment = 0.0;  // E[(X_T)_+^{alpha theta_star}], 3-SE inflated
    Eigen::Index sample_count = 0;
};

// Empirical Choquet integral of non-negative samples under distortion w:
// with descending order statistics x_(1) >= ... >= x_(n),
//   sum_i x_(i) [w(i/n) - w((i-1)/n)].
// Requires finite non-negative samples and w(0) = 0, w(1) = 1.
double empirical_choquet(const std::vector<double>& samples,
                         const std::function<double(double)>& w);

// Analytic well-posedness bound assembled from the Chebyshev tail estimate:
//   B = g_plus (1 + k_plus (1 + M_x^gamma / (theta_star gamma - 1))),
// where M_x bounds E[(X_T)_+^{alpha theta_star}]. Throws PreferenceError when
// theta_star * gamma <= 1.
double wellposedness_bound(const Preferences& prefs, double terminal_moment_bound);

// Evaluates V+, V-, V = V+ - V- on the bundle's terminal data via empirical
// Choquet integrals, with bootstrap standard errors (joint path resampling,
// deterministic in the bundle seed) and the analytic bound attached.
CptReport evaluate(const PathBundle& bundle, const Preferences& prefs,
                   int bootstrap_resamples = 200);

struct PreferenceIssue {
    std::string check;
    std::string message;
};

struct PreferenceReport {
    std::vector<PreferenceIssue> issues;
    // Monte-Carlo estimate of the loss-side benchmark integral
    // int_0^inf w_-(P(u_-(G) > y)) dy; present when trajectories were given.
    std::optional<double> loss_benchmark_integral;

    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

// Function-level checks: endpoints (exact), monotonicity and the growth
// envelopes on uniform grids. Violations are report entries, not exceptions.
PreferenceReport validate_preferences(const Preferences& prefs, int grid_size);

// Additionally checks F >= 0 on the bundle's factor paths, estimates the
// loss-side benchmark integral, and flags a non-constant benchmark on the
// extended variant (where the factor is fed by the wealth).
PreferenceReport validate_preferences(const Preferences& prefs, int grid_size,
                                      const PathBundle& bundle);

// Built-in preference families.
namespace preferences {

// u(z) = coef * z^exponent
std::function<double(double)> power_utility(double coef, double exponent);
std::function<double(double)> identity_distortion();
// w(p) = p^exponent
std::function<double(double)> power_distortion(double exponent);
// w(p) = p^delta / (p^delta + (1-p)^delta)^{1/delta}
std::function<double(double)> tversky_kahneman_distortion(double delta);

Benchmark constant_benchmark(double value, double theta_star);
// F(y) = max(0, intercept + slope * y_T[0])
Benchmark terminal_relu_benchmark(double intercept, double slope, double theta_star);
// F(y) = scale * max_{s<=T} |y_s|
Benchmark running_max_benchmark(double scale, double theta_star);

}  // namespace preferences

}  // namespace prospect
