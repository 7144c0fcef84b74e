#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>

#include "prospect/path_view.hpp"

namespace prospect {

// Numerical noise below this is clamped away; anything larger is a genuine
// control violation and raises ControlError.
inline constexpr double kControlClampTolerance = 1e-12;

// Proportion of wealth invested in the risky asset, phi in [0,1], evaluated
// on (t, Y path so far, X path so far). Non-anticipative by construction.
class Policy {
public:
    using Evaluator = std::function<double(double, const PathView& y, const PathView& x)>;

    Policy() = default;
    Policy(std::string name, Evaluator evaluator)
        : name_(std::move(name)), evaluator_(std::move(evaluator)) {}

    static Policy constant(double phi);

    // Clamps into [0,1]; throws ControlError on non-finite output.
    double operator()(double t, const PathView& y, const PathView& x) const;
    double raw(double t, const PathView& y, const PathView& x) const {
        return evaluator_(t, y, x);
    }

    const std::string& name() const { return name_; }
    bool valid() const { return static_cast<bool>(evaluator_); }

private:
    std::string name_;
    Evaluator evaluator_;
};

// Relaxed coordinates: drift loading l and squared diffusion loading m with
// 0 <= l <= sqrt(m) <= 1.
struct RelaxedCoefficients {
    double drift_load = 0.0;     // l
    double variance_load = 0.0;  // m
};

class RelaxedControl {
public:
    using Evaluator = std::function<double(double, const PathView& y, const PathView& x)>;

    RelaxedControl() = default;
    RelaxedControl(std::string name, Evaluator l, Evaluator m)
        : name_(std::move(name)), l_(std::move(l)), m_(std::move(m)) {}

    static RelaxedControl constant(double l, double m);

    // Embedding of an ordinary strategy: l = phi, m = phi^2.
    static RelaxedControl from_policy(const Policy& policy);

    // Validated and clamped; throws ControlError when the raw values violate
    // 0 <= l <= sqrt(m) <= 1 beyond kControlClampTolerance.
    RelaxedCoefficients operator()(double t, const PathView& y, const PathView& x) const;
    RelaxedCoefficients raw(double t, const PathView& y, const PathView& x) const {
        return {l_(t, y, x), m_(t, y, x)};
    }

    const std::string& name() const { return name_; }
    bool valid() const { return static_cast<bool>(l_) && static_cast<bool>(m_); }

private:
    std::string name_;
    Evaluator l_;
    Evaluator m_;
};

using Control = std::variant<Policy, RelaxedControl>;

// Clamp helper shared by the simulator (which decorates errors with the step
// index) and RelaxedControl::operator().
RelaxedCoefficients clamp_relaxed(double l, double m, double t, const std::string& where);

}  // namespace prospect
