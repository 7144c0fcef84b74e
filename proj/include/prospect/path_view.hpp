#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace prospect {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Non-owning view of a trajectory restricted to [0, t] on a uniform grid.
// `data` is row-major (grid point, component); the view exposes the grid
// points with t_i <= t plus the value at t itself, linearly interpolated when
// t falls between grid points. Coefficient functionals and controls only ever
// see one of these, which enforces non-anticipativity mechanically.
class PathView {
public:
    // Right endpoint exactly on the grid: t = (points_on_grid - 1) * dt.
    PathView(const double* data, Eigen::Index dim, Eigen::Index points_on_grid, double dt)
        : data_(data), dim_(dim), n_(points_on_grid), dt_(dt),
          t_((points_on_grid - 1) * dt), frac_(0.0) {
        if (dim_ < 1 || n_ < 1 || !(dt_ > 0.0)) {
            throw std::invalid_argument("PathView: need dim >= 1, points >= 1, dt > 0");
        }
    }

    // General right endpoint; `points_available` rows are readable from data.
    // Requires the path to be defined at least through t.
    static PathView truncated(const double* data, Eigen::Index dim,
                              Eigen::Index points_available, double dt, double t) {
        if (dim < 1 || points_available < 1 || !(dt > 0.0)) {
            throw std::invalid_argument("PathView: need dim >= 1, points >= 1, dt > 0");
        }
        if (t < 0.0) throw std::invalid_argument("PathView: t < 0");
        const double u = t / dt;
        auto idx = static_cast<Eigen::Index>(std::floor(u + 1e-9 * (1.0 + u)));
        double frac = u - static_cast<double>(idx);
        if (frac < 1e-9 * (1.0 + u)) frac = 0.0;
        const Eigen::Index needed = idx + (frac > 0.0 ? 2 : 1);
        if (needed > points_available) {
            throw std::invalid_argument("PathView: path not defined through t");
        }
        return PathView(data, dim, idx + 1, dt, t, frac);
    }

    double time() const { return t_; }
    double step() const { return dt_; }
    Eigen::Index dim() const { return dim_; }

    // Number of grid points with t_i <= t.
    Eigen::Index grid_points() const { return n_; }
    double grid_time(Eigen::Index i) const { return static_cast<double>(i) * dt_; }

    double value(Eigen::Index i, Eigen::Index k = 0) const { return data_[i * dim_ + k]; }

    // Row-major (grid point, component) storage underneath the view.
    const double* data() const { return data_; }

    Eigen::Map<const RowMajorMatrix> grid_values() const {
        return Eigen::Map<const RowMajorMatrix>(data_, n_, dim_);
    }

    // Value of the (piecewise-linear) trajectory at the right endpoint t.
    Eigen::VectorXd end_value() const {
        Eigen::VectorXd v(dim_);
        for (Eigen::Index k = 0; k < dim_; ++k) v[k] = end_scalar(k);
        return v;
    }

    double end_scalar(Eigen::Index k = 0) const {
        const double a = data_[(n_ - 1) * dim_ + k];
        if (frac_ == 0.0) return a;
        const double b = data_[n_ * dim_ + k];
        return a + frac_ * (b - a);
    }

private:
    PathView(const double* data, Eigen::Index dim, Eigen::Index n, double dt, double t,
             double frac)
        : data_(data), dim_(dim), n_(n), dt_(dt), t_(t), frac_(frac) {}

    const double* data_;
    Eigen::Index dim_;
    Eigen::Index n_;
    double dt_;
    double t_;
    double frac_;
};

}  // namespace prospect
