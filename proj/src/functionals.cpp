#include "prospect/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace prospect::functionals {

namespace {
double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }
}  // namespace

ScalarFunctional constant(double value) {
    return {"constant", [value](double, const PathView&) { return value; }, std::abs(value)};
}

ScalarFunctional affine_state(double intercept, double slope, double lo, double hi,
                              Eigen::Index component) {
    auto eval = [=](double, const PathView& y) {
        return clamp(intercept + slope * y.end_scalar(component), lo, hi);
    };
    return {"affine_state", eval, std::max(std::abs(lo), std::abs(hi))};
}

ScalarFunctional running_max_norm(double scale, double cap) {
    auto eval = [=](double, const PathView& y) {
        double m = 0.0;
        const Eigen::Index d = y.dim();
        for (Eigen::Index i = 0; i < y.grid_points(); ++i) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < d; ++k) {
                const double v = y.value(i, k);
                s += v * v;
            }
            m = std::max(m, s);
        }
        double s_end = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
            const double v = y.end_scalar(k);
            s_end += v * v;
        }
        m = std::max(m, s_end);
        return std::min(cap, scale * std::sqrt(m));
    };
    return {"running_max_norm", eval, std::abs(cap)};
}

ScalarFunctional state_integral(double scale, double lo, double hi, Eigen::Index component) {
    auto eval = [=](double t, const PathView& y) {
        const double dt = y.step();
        double acc = 0.0;
        for (Eigen::Index i = 0; i + 1 < y.grid_points(); ++i) {
            acc += 0.5 * (y.value(i, component) + y.value(i + 1, component)) * dt;
        }
        // partial segment between the last grid point and t
        const double tail = t - y.grid_time(y.grid_points() - 1);
        if (tail > 0.0) {
            acc += 0.5 * (y.value(y.grid_points() - 1, component) + y.end_scalar(component)) *
                   tail;
        }
        return clamp(scale * acc, lo, hi);
    };
    return {"state_integral", eval, std::max(std::abs(lo), std::abs(hi))};
}

ScalarFunctional tanh_state(double level, double amplitude, double slope, double center,
                            Eigen::Index component) {
    auto eval = [=](double, const PathView& y) {
        return level + amplitude * std::tanh(slope * (y.end_scalar(component) - center));
    };
    return {"tanh_state", eval, std::abs(level) + std::abs(amplitude)};
}

VectorFunctional vector_constant(const Eigen::VectorXd& value) {
    return {"constant", [value](double, const PathView&) { return value; }, value.norm()};
}

MatrixFunctional matrix_constant(const Eigen::MatrixXd& value) {
    const double spectral =
        value.size() == 0
            ? 0.0
            : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (value + value.transpose()))
                  .eigenvalues()
                  .cwiseAbs()
                  .maxCoeff();
    return {"constant", [value](double, const PathView&) { return value; }, spectral};
}

VectorFunctional isotropic_vector(const ScalarFunctional& f, Eigen::Index d) {
    auto eval = [f, d](double t, const PathView& y) {
        return Eigen::VectorXd::Constant(d, f(t, y)).eval();
    };
    return {f.name(), eval, f.declared_bound() * std::sqrt(static_cast<double>(d))};
}

MatrixFunctional isotropic_matrix(const ScalarFunctional& f, Eigen::Index d) {
    auto eval = [f, d](double t, const PathView& y) {
        return (f(t, y) * Eigen::MatrixXd::Identity(d, d)).eval();
    };
    return {f.name(), eval, f.declared_bound()};
}

}  // namespace prospect::functionals
