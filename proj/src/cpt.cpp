#include "prospect/cpt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "prospect/errors.hpp"
#include "prospect/rng.hpp"

namespace prospect {

double empirical_choquet(const std::vector<double>& samples,
                         const std::function<double(double)>& w) {
    if (samples.empty()) throw std::invalid_argument("empirical_choquet: empty sample set");
    for (const double s : samples) {
        if (!std::isfinite(s) || s < 0.0) {
            throw std::invalid_argument(
                "empirical_choquet: samples must be finite and non-negative");
        }
    }
    if (w(0.0) != 0.0 || w(1.0) != 1.0) {
        throw std::invalid_argument("empirical_choquet: distortion must have w(0)=0, w(1)=1");
    }
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    const auto n = static_cast<double>(sorted.size());
    double acc = 0.0;
    double w_prev = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double w_cur = w(static_cast<double>(i + 1) / n);
        acc += sorted[i] * (w_cur - w_prev);
        w_prev = w_cur;
    }
    return acc;
}

double wellposedness_bound(const Preferences& prefs, double terminal_moment_bound) {
    const double tg = prefs.benchmark.theta_star * prefs.distortions.gamma;
    if (!(tg > 1.0)) {
        std::ostringstream os;
        os << "well-posedness requires theta_star * gamma > 1 (got " << tg << ")";
        throw PreferenceError(os.str());
    }
    if (!(terminal_moment_bound >= 0.0) || !std::isfinite(terminal_moment_bound)) {
        throw std::invalid_argument("wellposedness_bound: moment bound must be finite, >= 0");
    }
    const double g = prefs.distortions.g_plus;
    const double k = prefs.utilities.k_plus;
    const double tail = std::pow(terminal_moment_bound, prefs.distortions.gamma) / (tg - 1.0);
    return g * (1.0 + k * (1.0 + tail));
}

namespace {

struct ChoquetSamples {
    std::vector<double> values;           // per path
    std::vector<Eigen::Index> order;      // path indices sorted by value, descending
};

ChoquetSamples sorted_samples(std::vector<double> values) {
    ChoquetSamples out;
    out.order.resize(values.size());
    std::iota(out.order.begin(), out.order.end(), Eigen::Index{0});
    std::stable_sort(out.order.begin(), out.order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
    });
    out.values = std::move(values);
    return out;
}

// Choquet integral of the multiset {values[p] with multiplicity counts[p]},
// equal to empirical_choquet on the expanded sample of size n.
double choquet_with_counts(const ChoquetSamples& s, const std::vector<std::uint32_t>& counts,
                           Eigen::Index n, const std::function<double(double)>& w) {
    double acc = 0.0;
    double w_prev = 0.0;
    std::uint64_t cum = 0;
    for (const Eigen::Index p : s.order) {
        const std::uint32_t c = counts[static_cast<std::size_t>(p)];
        if (c == 0) continue;
        cum += c;
        const double w_cur = w(static_cast<double>(cum) / static_cast<double>(n));
        acc += s.values[static_cast<std::size_t>(p)] * (w_cur - w_prev);
        w_prev = w_cur;
    }
    return acc;
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double acc = 0.0;
    for (const double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

CptReport evaluate(const PathBundle& bundle, const Preferences& prefs,
                   int bootstrap_resamples) {
    if (bootstrap_resamples < 2) {
        throw std::invalid_argument("evaluate: need at least 2 bootstrap resamples");
    }
    if (bundle.model && bundle.model->variant == Variant::extended &&
        !prefs.benchmark.constant) {
        throw PreferenceError(
            "extended variant requires a constant benchmark: the factor path is fed by the "
            "wealth process, so a path-dependent reference point depends on the control");
    }

    const Eigen::Index paths = bundle.path_count();
    const Eigen::Index n = bundle.grid.steps;
    const double at = prefs.utilities.alpha * prefs.benchmark.theta_star;

    std::vector<double> gains(static_cast<std::size_t>(paths));
    std::vector<double> losses(static_cast<std::size_t>(paths));
    double moment_sum = 0.0;
    double moment_sumsq = 0.0;
    for (Eigen::Index p = 0; p < paths; ++p) {
        const double xt = bundle.x(n, p);
        if (!std::isfinite(xt)) {
            std::ostringstream os;
            os << "evaluate: non-finite terminal wealth on path " << p;
            throw NumericalError(os.str());
        }
        const double g = prefs.benchmark.value(bundle.y_view(p, n));
        if (!std::isfinite(g)) {
            std::ostringstream os;
            os << "evaluate: non-finite benchmark value on path " << p;
            throw NumericalError(os.str());
        }
        const double diff = xt - g;
        const double gain = prefs.utilities.u_plus(std::max(diff, 0.0));
        const double loss = prefs.utilities.u_minus(std::max(-diff, 0.0));
        if (!std::isfinite(gain) || !std::isfinite(loss) || gain < 0.0 || loss < 0.0) {
            std::ostringstream os;
            os << "evaluate: utility produced a non-finite or negative value on path " << p
               << " (gain " << gain << ", loss " << loss << ")";
            throw NumericalError(os.str());
        }
        gains[static_cast<std::size_t>(p)] = gain;
        losses[static_cast<std::size_t>(p)] = loss;
        const double mom = std::pow(std::max(xt, 0.0), at);
        moment_sum += mom;
        moment_sumsq += mom * mom;
    }

    CptReport report;
    report.sample_count = paths;
    report.v_plus = empirical_choquet(gains, prefs.distortions.w_plus);
    report.v_minus = empirical_choquet(losses, prefs.distortions.w_minus);
    report.v = report.v_plus - report.v_minus;

    // Joint path resampling keeps the gain/loss dependence; deterministic in
    // the bundle seed.
    const ChoquetSamples gs = sorted_samples(gains);
    const ChoquetSamples ls = sorted_samples(losses);
    const GaussianStream g(bundle.seed, rng_streams::bootstrap);
    std::vector<double> rep_plus, rep_minus, rep_v;
    rep_plus.reserve(bootstrap_resamples);
    rep_minus.reserve(bootstrap_resamples);
    rep_v.reserve(bootstrap_resamples);
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(paths));
    for (int b = 0; b < bootstrap_resamples; ++b) {
        std::fill(counts.begin(), counts.end(), 0u);
        for (Eigen::Index k = 0; k < paths; ++k) {
            const auto idx = static_cast<std::size_t>(
                g.uniform(static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(k)) *
                static_cast<double>(paths));
            counts[std::min(idx, static_cast<std::size_t>(paths - 1))]++;
        }
        const double bp = choquet_with_counts(gs, counts, paths, prefs.distortions.w_plus);
        const double bm = choquet_with_counts(ls, counts, paths, prefs.distortions.w_minus);
        rep_plus.push_back(bp);
        rep_minus.push_back(bm);
        rep_v.push_back(bp - bm);
    }
    report.se_plus = sample_sd(rep_plus);
    report.se_minus = sample_sd(rep_minus);
    report.se_v = sample_sd(rep_v);

    const double mom_mean = moment_sum / static_cast<double>(paths);
    double mom_se = 0.0;
    if (paths > 1) {
        const double var =
            std::max(0.0, (moment_sumsq - static_cast<double>(paths) * mom_mean * mom_mean) /
                              static_cast<double>(paths - 1));
        mom_se = std::sqrt(var / static_cast<double>(paths));
    }
    report.terminal_moment = mom_mean + 3.0 * mom_se;
    report.analytic_bound = wellposedness_bound(prefs, report.terminal_moment);
    return report;
}

std::string PreferenceReport::summary() const {
    std::ostringstream os;
    if (ok()) {
        os << "preference validation: no violations";
    } else {
        os << "preference validation: " << issues.size() << " violation(s)";
        for (const auto& v : issues) os << "\n  [" << v.check << "] " << v.message;
    }
    if (loss_benchmark_integral) {
        os << "\n  loss-side benchmark integral estimate: " << *loss_benchmark_integral;
    }
    return os.str();
}

namespace {

void check_function_level(const Preferences& prefs, int grid_size, PreferenceReport& report) {
    const auto flag = [&](const std::string& check, const std::string& msg) {
        report.issues.push_back({check, msg});
    };
    const auto& u = prefs.utilities;
    const auto& w = prefs.distortions;

    if (u.u_plus(0.0) != 0.0) flag("u_plus_zero", "u_plus(0) != 0");
    if (u.u_minus(0.0) != 0.0) flag("u_minus_zero", "u_minus(0) != 0");
    if (w.w_plus(0.0) != 0.0) flag("w_plus_zero", "w_plus(0) != 0");
    if (w.w_minus(0.0) != 0.0) flag("w_minus_zero", "w_minus(0) != 0");
    if (w.w_plus(1.0) != 1.0) flag("w_plus_one", "w_plus(1) != 1");
    if (w.w_minus(1.0) != 1.0) flag("w_minus_one", "w_minus(1) != 1");
    if (!prefs.well_posed()) {
        std::ostringstream os;
        os << "theta_star * gamma = " << prefs.benchmark.theta_star * w.gamma
           << " <= 1; the value functional may be infinite";
        flag("well_posedness", os.str());
    }

    // Monotonicity and growth envelopes on uniform grids; u is sampled on
    // [0, 10], w on [0, 1].
    constexpr double kUtilityRange = 10.0;
    double prev_up = 0.0, prev_um = 0.0, prev_wp = 0.0, prev_wm = 0.0;
    for (int i = 0; i <= grid_size; ++i) {
        const double z = kUtilityRange * static_cast<double>(i) / grid_size;
        const double p = static_cast<double>(i) / grid_size;
        const double up = u.u_plus(z);
        const double um = u.u_minus(z);
        const double wp = w.w_plus(p);
        const double wm = w.w_minus(p);
        if (i > 0 && up < prev_up) flag("u_plus_monotone", "u_plus decreases near z=" + std::to_string(z));
        if (i > 0 && um < prev_um) flag("u_minus_monotone", "u_minus decreases near z=" + std::to_string(z));
        if (i > 0 && wp < prev_wp) flag("w_plus_monotone", "w_plus decreases near p=" + std::to_string(p));
        if (i > 0 && wm < prev_wm) flag("w_minus_monotone", "w_minus decreases near p=" + std::to_string(p));
        if (up > u.k_plus * (std::pow(z, u.alpha) + 1.0) + 1e-12) {
            std::ostringstream os;
            os << "u_plus(" << z << ") = " << up << " exceeds k_plus (z^alpha + 1) = "
               << u.k_plus * (std::pow(z, u.alpha) + 1.0);
            flag("u_plus_growth", os.str());
        }
        if (wp > w.g_plus * std::pow(p, w.gamma) + 1e-12) {
            std::ostringstream os;
            os << "w_plus(" << p << ") = " << wp << " exceeds g_plus p^gamma = "
               << w.g_plus * std::pow(p, w.gamma);
            flag("w_plus_growth", os.str());
        }
        prev_up = up;
        prev_um = um;
        prev_wp = wp;
        prev_wm = wm;
    }
}

}  // namespace

PreferenceReport validate_preferences(const Preferences& prefs, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("validate_preferences: grid_size >= 2");
    PreferenceReport report;
    check_function_level(prefs, grid_size, report);
    return report;
}

PreferenceReport validate_preferences(const Preferences& prefs, int grid_size,
                                      const PathBundle& bundle) {
    PreferenceReport report = validate_preferences(prefs, grid_size);

    if (bundle.model && bundle.model->variant == Variant::extended &&
        !prefs.benchmark.constant) {
        report.issues.push_back(
            {"constant_benchmark",
             "the extended variant requires a constant benchmark; a path-dependent reference "
             "point has a control-dependent law there"});
    }

    const Eigen::Index n = bundle.grid.steps;
    std::vector<double> loss_samples;
    loss_samples.reserve(static_cast<std::size_t>(bundle.path_count()));
    bool nonneg_ok = true;
    for (Eigen::Index p = 0; p < bundle.path_count(); ++p) {
        const double gval = prefs.benchmark.value(bundle.y_view(p, n));
        if (gval < 0.0 && nonneg_ok) {
            std::ostringstream os;
            os << "benchmark F(y) = " << gval << " < 0 on path " << p;
            report.issues.push_back({"benchmark_nonnegative", os.str()});
            nonneg_ok = false;
        }
        loss_samples.push_back(prefs.utilities.u_minus(std::max(gval, 0.0)));
    }
    // Finiteness proxy for the loss side at the worst admissible wealth
    // (X_T = 0 gives losses u_-(G)): finite estimate = membership evidence.
    report.loss_benchmark_integral =
        empirical_choquet(loss_samples, prefs.distortions.w_minus);
    return report;
}

namespace preferences {

std::function<double(double)> power_utility(double coef, double exponent) {
    return [coef, exponent](double z) { return z <= 0.0 ? 0.0 : coef * std::pow(z, exponent); };
}

std::function<double(double)> identity_distortion() {
    return [](double p) { return p; };
}

std::function<double(double)> power_distortion(double exponent) {
    return [exponent](double p) { return p <= 0.0 ? 0.0 : std::pow(p, exponent); };
}

std::function<double(double)> tversky_kahneman_distortion(double delta) {
    return [delta](double p) {
        if (p <= 0.0) return 0.0;
        if (p >= 1.0) return 1.0;
        const double pd = std::pow(p, delta);
        const double qd = std::pow(1.0 - p, delta);
        return pd / std::pow(pd + qd, 1.0 / delta);
    };
}

Benchmark constant_benchmark(double value, double theta_star) {
    Benchmark b;
    b.value = [value](const PathView&) { return value; };
    b.theta_star = theta_star;
    b.constant = true;
    b.constant_value = value;
    return b;
}

Benchmark terminal_relu_benchmark(double intercept, double slope, double theta_star) {
    Benchmark b;
    b.value = [intercept, slope](const PathView& y) {
        return std::max(0.0, intercept + slope * y.end_scalar(0));
    };
    b.theta_star = theta_star;
    return b;
}

Benchmark running_max_benchmark(double scale, double theta_star) {
    Benchmark b;
    b.value = [scale](const PathView& y) {
        double m = 0.0;
        for (Eigen::Index i = 0; i < y.grid_points(); ++i) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < y.dim(); ++k) s += y.value(i, k) * y.value(i, k);
            m = std::max(m, s);
        }
        return scale * std::sqrt(m);
    };
    b.theta_star = theta_star;
    return b;
}

}  // namespace preferences

}  // namespace prospect
