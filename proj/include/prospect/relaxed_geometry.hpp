#pragma once

#include <Eigen/Dense>

#include "prospect/path_engine.hpp"

namespace prospect {

// Eigenvalues of a above -kPsdTolerance count as positive semidefinite.
inline constexpr double kPsdTolerance = 1e-12;
inline constexpr double kMembershipTolerance = 1e-9;

// A candidate drift/diffusion pair (a, b) of the martingale-problem
// formulation: a is a symmetric PSD (d+1)x(d+1) matrix, b a (d+1)-vector.
struct ControlSetPoint {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
};

// Frozen coefficient data fixing the set A_t(x., y.): time, current wealth
// and the coefficient evaluations at (t, paths). Built either from a model
// and trajectories (consistent with coefficient_at) or from raw values.
class SetContext {
public:
    static SetContext at(const MarketModel& model, double t, const PathView& y_path,
                         const PathView& x_path);
    static SetContext base_values(double t, double wealth, Eigen::MatrixXd kappa,
                                  Eigen::VectorXd nu, double theta, double lambda,
                                  double coefficient_bound);
    static SetContext extended_values(double t, double wealth, double kappa, double nu,
                                      double theta, double lambda, double rho, double rate,
                                      double coefficient_bound);

    Variant variant() const { return variant_; }
    Eigen::Index dimension() const { return nu_.size(); }
    double time() const { return t_; }
    double wealth() const { return wealth_; }
    const Eigen::MatrixXd& kappa() const { return kappa_; }
    const Eigen::VectorXd& nu() const { return nu_; }
    double theta() const { return theta_; }
    double lambda() const { return lambda_; }
    double rho() const { return rho_; }
    double rate() const { return rate_; }
    double coefficient_bound() const { return bound_; }

private:
    Variant variant_ = Variant::base;
    double t_ = 0.0;
    double wealth_ = 0.0;
    Eigen::MatrixXd kappa_;
    Eigen::VectorXd nu_;
    double theta_ = 0.0;
    double lambda_ = 0.0;
    double rho_ = 0.0;
    double rate_ = 0.0;
    double bound_ = 0.0;
};

struct MembershipResult {
    bool inside = false;
    double l = 0.0;         // recovered drift loading
    double m = 0.0;         // recovered squared diffusion loading
    double residual = 0.0;  // worst absolute mismatch in the fixed structure
};

// Builds the member point with coordinates (l, m); no constraint check, so
// out-of-range coordinates produce points that membership() rejects.
ControlSetPoint make_member(const SetContext& ctx, double l, double m);

// Recovers (l, m) with the zero-denominator convention (coordinate := 0 when
// lambda x_t = 0 resp. theta x_t = 0), rebuilds the point, and accepts when
// the structural residual is within tol, a is PSD, and 0 <= l <= sqrt(m) <= 1
// up to tol.
MembershipResult membership(const SetContext& ctx, const ControlSetPoint& point,
                            double tol = kMembershipTolerance);

// Support function F(u, v) = max { sum a_ij u_ij + sum b_j v_j } over the
// set. The variable part c1 m + c2 l is maximised in closed form over
// {0 <= m <= 1, 0 <= l <= sqrt(m)}: vertices (0,0), (1,0), (1,1) plus the
// interior stationary point m* = (c2 / 2 c1)^2 when c1 < 0 < c2 and m* <= 1.
double support_function(const SetContext& ctx, const Eigen::MatrixXd& u,
                        const Eigen::VectorXd& v);

// Membership of mu p1 + (1 - mu) p2; requires p1, p2 inside.
MembershipResult convexity_witness(const SetContext& ctx, const ControlSetPoint& p1,
                                   const ControlSetPoint& p2, double mu,
                                   double tol = kMembershipTolerance);

// Certified bound on |(a, b)| over the set, a function of the coefficient
// bound M and the current wealth only. Every member point satisfies it.
double norm_bound(const SetContext& ctx);

struct DominanceResult {
    PathBundle bundle;   // X replaced by Xhat = Z X, control = policy sqrt(m)
    Eigen::MatrixXd z;   // (N+1) x paths multiplier, Z >= 1 at every point
};

// Dominance lift for a relaxed bundle on the base variant:
//   Z_t = exp( + int_0^t (sqrt(m_s) - l_s) theta_s ds ) >= 1 (left-endpoint
// quadrature, every term non-negative), Xhat = Z X pathwise. Requires theta
// >= 0 (validated beforehand); throws UnsupportedError on the extended
// variant, where no such lift is available.
DominanceResult dominance_transform(const PathBundle& bundle, const MarketModel& model);

}  // namespace prospect
