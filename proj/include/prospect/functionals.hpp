#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>

#include "prospect/path_view.hpp"

namespace prospect {

// A path-dependent coefficient: (t, trajectory on [0,t]) -> value, together
// with a declared sup-norm bound over all admissible inputs. Evaluation only
// sees the PathView, so it cannot depend on the trajectory beyond t.
template <class Value>
class PathFunctional {
public:
    using Evaluator = std::function<Value(double, const PathView&)>;

    PathFunctional() = default;
    PathFunctional(std::string name, Evaluator evaluator, double declared_bound)
        : name_(std::move(name)), evaluator_(std::move(evaluator)), bound_(declared_bound) {}

    Value operator()(double t, const PathView& path) const { return evaluator_(t, path); }

    const std::string& name() const { return name_; }
    double declared_bound() const { return bound_; }
    bool valid() const { return static_cast<bool>(evaluator_); }

private:
    std::string name_;
    Evaluator evaluator_;
    double bound_ = 0.0;
};

using ScalarFunctional = PathFunctional<double>;
using VectorFunctional = PathFunctional<Eigen::VectorXd>;
using MatrixFunctional = PathFunctional<Eigen::MatrixXd>;

// Built-in functional library. All members are path-continuous (they depend
// on the trajectory through sup-norm-continuous statistics) and respect their
// declared bound by construction; user-supplied evaluators must satisfy the
// same contract, which validate_model spot-checks at random probes.
namespace functionals {

ScalarFunctional constant(double value);

// clamp(intercept + slope * y_t[component], lo, hi)
ScalarFunctional affine_state(double intercept, double slope, double lo, double hi,
                              Eigen::Index component = 0);

// min(cap, scale * max_{s <= t} |y_s|), Euclidean norm over components
ScalarFunctional running_max_norm(double scale, double cap);

// clamp(scale * int_0^t y_s[component] ds, lo, hi), trapezoidal on the grid
ScalarFunctional state_integral(double scale, double lo, double hi,
                                Eigen::Index component = 0);

// level + amplitude * tanh(slope * (y_t[component] - center))
ScalarFunctional tanh_state(double level, double amplitude, double slope, double center,
                            Eigen::Index component = 0);

VectorFunctional vector_constant(const Eigen::VectorXd& value);
MatrixFunctional matrix_constant(const Eigen::MatrixXd& value);

// f(t, y) replicated over all d components; declared bound scales with sqrt(d).
VectorFunctional isotropic_vector(const ScalarFunctional& f, Eigen::Index d);

// f(t, y) * Identity(d); the declared (spectral) bound equals f's bound.
MatrixFunctional isotropic_matrix(const ScalarFunctional& f, Eigen::Index d);

}  // namespace functionals

}  // namespace prospect
