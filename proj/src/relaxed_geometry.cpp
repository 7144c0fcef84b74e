#include "prospect/relaxed_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "prospect/errors.hpp"

namespace prospect {

SetContext SetContext::at(const MarketModel& model, double t, const PathView& y_path,
                          const PathView& x_path) {
    SetContext ctx;
    ctx.variant_ = model.variant;
    ctx.t_ = t;
    ctx.kappa_ = coefficient_at(model, CoefficientName::kappa, t, y_path);
    ctx.nu_ = coefficient_at(model, CoefficientName::nu, t, y_path).col(0);
    ctx.theta_ = coefficient_at(model, CoefficientName::theta, t, y_path)(0, 0);
    ctx.lambda_ = coefficient_at(model, CoefficientName::lambda, t, y_path)(0, 0);
    const PathView xr = PathView::truncated(x_path.data(), 1,
                                            x_path.grid_points(), x_path.step(), t);
    ctx.wealth_ = xr.end_scalar(0);
    if (model.variant == Variant::extended) {
        ctx.rho_ = coefficient_at(model, CoefficientName::rho, t, x_path)(0, 0);
        ctx.rate_ = model.rate(t);
        ctx.bound_ = model.extended_coefficient_bound();
    } else {
        ctx.bound_ = model.coefficient_bound();
    }
    return ctx;
}

SetContext SetContext::base_values(double t, double wealth, Eigen::MatrixXd kappa,
                                   Eigen::VectorXd nu, double theta, double lambda,
                                   double coefficient_bound) {
    SetContext ctx;
    ctx.variant_ = Variant::base;
    ctx.t_ = t;
    ctx.wealth_ = wealth;
    ctx.kappa_ = std::move(kappa);
    ctx.nu_ = std::move(nu);
    ctx.theta_ = theta;
    ctx.lambda_ = lambda;
    ctx.bound_ = coefficient_bound;
    return ctx;
}

SetContext SetContext::extended_values(double t, double wealth, double kappa, double nu,
                                       double theta, double lambda, double rho, double rate,
                                       double coefficient_bound) {
    SetContext ctx;
    ctx.variant_ = Variant::extended;
    ctx.t_ = t;
    ctx.wealth_ = wealth;
    ctx.kappa_ = Eigen::MatrixXd::Constant(1, 1, kappa);
    ctx.nu_ = Eigen::VectorXd::Constant(1, nu);
    ctx.theta_ = theta;
    ctx.lambda_ = lambda;
    ctx.rho_ = rho;
    ctx.rate_ = rate;
    ctx.bound_ = coefficient_bound;
    return ctx;
}

ControlSetPoint make_member(const SetContext& ctx, double l, double m) {
    const Eigen::Index d = ctx.dimension();
    ControlSetPoint p;
    p.a = Eigen::MatrixXd::Zero(d + 1, d + 1);
    p.b = Eigen::VectorXd::Zero(d + 1);
    const double x = ctx.wealth();
    const double lam2x2 = ctx.lambda() * ctx.lambda() * x * x;

    if (ctx.variant() == Variant::base) {
        p.a.topLeftCorner(d, d) = 0.5 * ctx.kappa() * ctx.kappa().transpose();
        p.a(d, d) = 0.5 * m * lam2x2;
        p.b.head(d) = ctx.nu();
        p.b(d) = l * ctx.theta() * x;
        return p;
    }

    // Extended variant (d = 1): rank-one rho coupling plus the rate shift.
    const double rho = ctx.rho();
    const double k = ctx.kappa()(0, 0);
    Eigen::Matrix2d coupling;
    coupling << rho * rho, rho, rho, 1.0;
    p.a(0, 0) = 0.5 * k * k;
    p.a += 0.5 * m * lam2x2 * coupling;
    const double theta_r = ctx.theta() - ctx.rate();
    const double drift = l * x * theta_r + ctx.rate() * x;
    p.b(0) = ctx.nu()(0) + drift * rho;
    p.b(1) = drift;
    return p;
}

MembershipResult membership(const SetContext& ctx, const ControlSetPoint& point, double tol) {
    const Eigen::Index d = ctx.dimension();
    if (point.a.rows() != d + 1 || point.a.cols() != d + 1 || point.b.size() != d + 1) {
        throw std::invalid_argument("membership: point dimensions do not match the context");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("membership: tol must be positive");

    MembershipResult res;
    const double x = ctx.wealth();
    const double lam2x2 = ctx.lambda() * ctx.lambda() * x * x;

    // Reported coordinates follow the zero-denominator convention: the
    // coordinate is 0 whenever its denominator vanishes.
    const bool m_pinned = lam2x2 != 0.0;
    res.m = m_pinned ? 2.0 * point.a(d, d) / lam2x2 : 0.0;
    const double l_den =
        ctx.variant() == Variant::base ? ctx.theta() * x : (ctx.theta() - ctx.rate()) * x;
    const bool l_pinned = l_den != 0.0;
    if (ctx.variant() == Variant::base) {
        res.l = l_pinned ? point.b(d) / l_den : 0.0;
    } else {
        res.l = l_pinned ? (point.b(d) - ctx.rate() * x) / l_den : 0.0;
    }

    const ControlSetPoint rebuilt = make_member(ctx, res.l, res.m);
    res.residual = std::max((point.a - rebuilt.a).cwiseAbs().maxCoeff(),
                            (point.b - rebuilt.b).cwiseAbs().maxCoeff());

    const Eigen::MatrixXd sym = 0.5 * (point.a + point.a.transpose());
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().minCoeff();

    // The set quantifies over admissible (l, m): when lambda x_t = 0 the m
    // slot of the point is 0 for every m, so the reported m = 0 is only one
    // realization and the l constraint relaxes to l <= sqrt(1).
    const double l_cap = m_pinned ? std::sqrt(std::max(res.m, 0.0)) : 1.0;
    const bool box_ok = (!m_pinned || (res.m >= -tol && res.m <= 1.0 + tol)) &&
                        (!l_pinned || (res.l >= -tol && res.l <= l_cap + tol));
    res.inside = res.residual <= tol && min_eig >= -kPsdTolerance && box_ok;
    return res;
}

double support_function(const SetContext& ctx, const Eigen::MatrixXd& u,
                        const Eigen::VectorXd& v) {
    const Eigen::Index d = ctx.dimension();
    if (u.rows() != d + 1 || u.cols() != d + 1 || v.size() != d + 1) {
        throw std::invalid_argument("support_function: probe dimensions do not match");
    }
    const double x = ctx.wealth();
    const double half_lam2x2 = 0.5 * ctx.lambda() * ctx.lambda() * x * x;

    double fixed, c1, c2;
    if (ctx.variant() == Variant::base) {
        fixed = (0.5 * ctx.kappa() * ctx.kappa().transpose())
                    .cwiseProduct(u.topLeftCorner(d, d))
                    .sum() +
                ctx.nu().dot(v.head(d));
        c1 = half_lam2x2 * u(d, d);
        c2 = ctx.theta() * x * v(d);
    } else {
        const double rho = ctx.rho();
        const double k = ctx.kappa()(0, 0);
        fixed = 0.5 * k * k * u(0, 0) + ctx.nu()(0) * v(0) +
                ctx.rate() * x * (rho * v(0) + v(1));
        c1 = half_lam2x2 * (rho * rho * u(0, 0) + rho * (u(0, 1) + u(1, 0)) + u(1, 1));
        c2 = (ctx.theta() - ctx.rate()) * x * (rho * v(0) + v(1));
    }

    // max of c1 m + c2 l over {0 <= m <= 1, 0 <= l <= sqrt(m)}.
    double best = std::max({0.0, c1, c1 + c2});
    if (c1 < 0.0 && c2 > 0.0) {
        const double s = c2 / (-2.0 * c1);  // sqrt(m*) at the stationary point
        if (s * s <= 1.0) best = std::max(best, c1 * s * s + c2 * s);
    }
    return fixed + best;
}

MembershipResult convexity_witness(const SetContext& ctx, const ControlSetPoint& p1,
                                   const ControlSetPoint& p2, double mu, double tol) {
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("convexity_witness: mu in [0,1]");
    if (!membership(ctx, p1, tol).inside || !membership(ctx, p2, tol).inside) {
        throw std::invalid_argument("convexity_witness: both endpoints must be members");
    }
    ControlSetPoint combined;
    combined.a = mu * p1.a + (1.0 - mu) * p2.a;
    combined.b = mu * p1.b + (1.0 - mu) * p2.b;
    return membership(ctx, combined, tol);
}

double norm_bound(const SetContext& ctx) {
    const double x = ctx.wealth();
    const double x2 = x * x;
    if (ctx.variant() == Variant::base) {
        const double m = ctx.coefficient_bound();
        // d = 1 reproduces 0.5 (M+1)^2 + M^2 x^2; the d^(1/4) factor covers
        // the Frobenius norm of the kappa block in higher dimension.
        const double c = m * std::pow(static_cast<double>(ctx.dimension()), 0.25);
        return 0.5 * (c + 1.0) * (c + 1.0) + m * m * x2;
    }
    const double m = ctx.coefficient_bound();
    const double s = std::sqrt(m * m + 1.0);
    const double k0 = 0.5 * m * m + m + m * s;
    const double k1 = 0.5 * m * m * (m * m + 1.0) + m * s;
    return std::max(k0, k1) * (1.0 + x2);
}

DominanceResult dominance_transform(const PathBundle& bundle, const MarketModel& model) {
    if (model.variant != Variant::base) {
        throw UnsupportedError(
            "dominance_transform: unsupported on the extended variant (the wealth feeds the "
            "factor there, so the lift has no pathwise guarantee)");
    }
    if (bundle.control_kind != ControlKind::relaxed || !bundle.control ||
        !std::holds_alternative<RelaxedControl>(*bundle.control)) {
        throw std::invalid_argument(
            "dominance_transform: bundle was not simulated under a relaxed control");
    }
    const auto& relaxed = std::get<RelaxedControl>(*bundle.control);
    const Eigen::Index n = bundle.grid.steps;
    const Eigen::Index paths = bundle.path_count();
    const double dt = bundle.grid.dt();

    DominanceResult out;
    out.z.resize(n + 1, paths);
    out.bundle = bundle;
    out.bundle.control_kind = ControlKind::policy;
    out.bundle.model = std::make_shared<const MarketModel>(model);

    for (Eigen::Index p = 0; p < paths; ++p) {
        double integral = 0.0;  // int (sqrt(m) - l) theta ds >= 0, term by term
        out.z(0, p) = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = bundle.grid.time(i);
            const PathView yv = bundle.y_view(p, i);
            const PathView xv = bundle.x_view(p, i);
            const RelaxedCoefficients rc = relaxed(t, yv, xv);
            const double theta = model.theta(t, yv);
            integral += (std::sqrt(rc.variance_load) - rc.drift_load) * theta * dt;
            out.z(i + 1, p) = std::exp(integral);
            out.bundle.x(i + 1, p) = out.z(i + 1, p) * bundle.x(i + 1, p);
        }
    }

    Policy lifted("sqrt_m(" + relaxed.name() + ")",
                  [relaxed](double t, const PathView& y, const PathView& x) {
                      return std::sqrt(relaxed(t, y, x).variance_load);
                  });
    out.bundle.control = std::make_shared<const Control>(std::move(lifted));
    return out;
}

}  // namespace prospect
