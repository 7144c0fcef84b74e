#include "prospect/controls.hpp"

#include <cmath>
#include <sstream>

#include "prospect/errors.hpp"

namespace prospect {

Policy Policy::constant(double phi) {
    return {"constant", [phi](double, const PathView&, const PathView&) { return phi; }};
}

double Policy::operator()(double t, const PathView& y, const PathView& x) const {
    const double v = evaluator_(t, y, x);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "policy '" << name_ << "' returned a non-finite value at t=" << t;
        throw ControlError(os.str());
    }
    return std::min(1.0, std::max(0.0, v));
}

RelaxedControl RelaxedControl::constant(double l, double m) {
    return {"constant",
            [l](double, const PathView&, const PathView&) { return l; },
            [m](double, const PathView&, const PathView&) { return m; }};
}

RelaxedControl RelaxedControl::from_policy(const Policy& policy) {
    return {"from_policy(" + policy.name() + ")",
            [policy](double t, const PathView& y, const PathView& x) { return policy(t, y, x); },
            [policy](double t, const PathView& y, const PathView& x) {
                const double p = policy(t, y, x);
                return p * p;
            }};
}

RelaxedCoefficients clamp_relaxed(double l, double m, double t, const std::string& where) {
    const auto fail = [&](const std::string& what) {
        std::ostringstream os;
        os << "relaxed control violates 0 <= l <= sqrt(m) <= 1 at " << where << " (t=" << t
           << "): " << what;
        throw ControlError(os.str());
    };
    if (!std::isfinite(l) || !std::isfinite(m)) fail("non-finite (l, m)");
    if (m < -kControlClampTolerance || m > 1.0 + kControlClampTolerance) {
        std::ostringstream os;
        os << "m = " << m;
        fail(os.str());
    }
    const double mc = std::min(1.0, std::max(0.0, m));
    const double s = std::sqrt(mc);
    if (l < -kControlClampTolerance || l > s + kControlClampTolerance) {
        std::ostringstream os;
        os << "l = " << l << ", sqrt(m) = " << s;
        fail(os.str());
    }
    return {std::min(s, std::max(0.0, l)), mc};
}

RelaxedCoefficients RelaxedControl::operator()(double t, const PathView& y,
                                               const PathView& x) const {
    return clamp_relaxed(l_(t, y, x), m_(t, y, x), t, "control '" + name_ + "'");
}

}  // namespace prospect
