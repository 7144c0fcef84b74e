#include "prospect/path_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "prospect/errors.hpp"
#include "prospect/rng.hpp"

namespace prospect {

void SimulationGrid::require_valid() const {
    if (steps < 1) throw ConfigError("grid: steps must be >= 1");
    if (!(horizon > 0.0)) throw ConfigError("grid: horizon must be positive");
}

namespace {

void run_over_paths(Eigen::Index path_count, int threads,
                    const std::function<void(Eigen::Index, Eigen::Index)>& body) {
    if (threads <= 1 || path_count < 2) {
        body(0, path_count);
        return;
    }
    const Eigen::Index workers = std::min<Eigen::Index>(threads, path_count);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const Eigen::Index chunk = (path_count + workers - 1) / workers;
    for (Eigen::Index w = 0; w < workers; ++w) {
        const Eigen::Index lo = w * chunk;
        const Eigen::Index hi = std::min(path_count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

struct StepControl {
    double drift_load;      // l (= phi for ordinary strategies)
    double variance_load;   // m (= phi^2)
    double diffusion_load;  // sqrt(m) (= phi)
};

StepControl control_at(const Control& control, double t, Eigen::Index step,
                       const PathView& yv, const PathView& xv) {
    if (const auto* policy = std::get_if<Policy>(&control)) {
        const double phi = (*policy)(t, yv, xv);
        return {phi, phi * phi, phi};
    }
    const auto& relaxed = std::get<RelaxedControl>(control);
    const RelaxedCoefficients raw = relaxed.raw(t, yv, xv);
    double l = raw.drift_load;
    double m = raw.variance_load;
    if (!std::isfinite(l) || !std::isfinite(m) || m < -kControlClampTolerance ||
        m > 1.0 + kControlClampTolerance) {
        clamp_relaxed(l, m, t, "step " + std::to_string(step));  // throws
    }
    m = std::min(1.0, std::max(0.0, m));
    const double s = std::sqrt(m);
    if (l < -kControlClampTolerance || l > s + kControlClampTolerance) {
        clamp_relaxed(l, raw.variance_load, t, "step " + std::to_string(step));  // throws
    }
    l = std::min(s, std::max(0.0, l));
    return {l, m, s};
}

}  // namespace

namespace detail {

PathBundle simulate_with_noise(const MarketModel& model, const Control& control,
                               const SimulationGrid& grid, Eigen::Index path_count,
                               std::uint64_t recorded_seed, Scheme scheme,
                               const NoiseFn& noise, int threads) {
    model.require_valid_shape();
    grid.require_valid();
    if (path_count < 1) throw std::invalid_argument("simulate: path_count must be >= 1");
    if (grid.horizon != model.horizon) {
        throw ConfigError("simulate: grid horizon differs from model horizon");
    }

    const Eigen::Index n = grid.steps;
    const Eigen::Index d = model.dimension;
    const double dt = grid.dt();
    const double sdt = std::sqrt(dt);
    const bool extended = model.variant == Variant::extended;

    PathBundle bundle;
    bundle.grid = grid;
    bundle.dimension = d;
    bundle.seed = recorded_seed;
    bundle.scheme = scheme;
    bundle.control_kind =
        std::holds_alternative<Policy>(control) ? ControlKind::policy : ControlKind::relaxed;
    bundle.model = std::make_shared<const MarketModel>(model);
    bundle.control = std::make_shared<const Control>(control);
    bundle.x.resize(n + 1, path_count);
    bundle.y.resize((n + 1) * d, path_count);

    auto body = [&](Eigen::Index lo, Eigen::Index hi) {
        Eigen::VectorXd z(d + 1);
        for (Eigen::Index p = lo; p < hi; ++p) {
            double* xc = bundle.x.col(p).data();
            double* yc = bundle.y.col(p).data();
            for (Eigen::Index k = 0; k < d; ++k) yc[k] = model.initial_factor[k];
            xc[0] = model.initial_wealth;

            for (Eigen::Index i = 0; i < n; ++i) {
                const double t = grid.time(i);
                const PathView yv(yc, d, i + 1, dt);
                const PathView xv(xc, 1, i + 1, dt);

                const StepControl sc = control_at(control, t, i, yv, xv);
                const double theta = model.theta(t, yv);
                const double lambda = model.lambda(t, yv);
                const Eigen::VectorXd nu = model.nu(t, yv);
                const Eigen::MatrixXd kappa = model.kappa(t, yv);

                noise(p, i, z.data());
                const double dw = sdt * z[d];

                const double xi = xc[i];
                double drift_rate;
                if (extended) {
                    const double r = model.rate(t);
                    drift_rate = sc.drift_load * (theta - r) + r;
                } else {
                    drift_rate = sc.drift_load * theta;
                }
                double xn;
                if (scheme == Scheme::exact_exponential) {
                    xn = xi * std::exp((drift_rate -
                                        0.5 * sc.variance_load * lambda * lambda) * dt +
                                       sc.diffusion_load * lambda * dw);
                } else {
                    xn = xi * (1.0 + drift_rate * dt + sc.diffusion_load * lambda * dw);
                }
                xc[i + 1] = xn;

                // dX is computed first; the extended factor receives rho * dX.
                const double rho_dx =
                    extended ? model.rho(t, xv) * (xn - xi) : 0.0;
                for (Eigen::Index k = 0; k < d; ++k) {
                    double diff = 0.0;
                    for (Eigen::Index j = 0; j < d; ++j) diff += kappa(k, j) * sdt * z[j];
                    yc[(i + 1) * d + k] = yc[i * d + k] + nu[k] * dt + diff + rho_dx;
                }
            }
        }
    };
    run_over_paths(path_count, threads, body);
    return bundle;
}

}  // namespace detail

PathBundle simulate(const MarketModel& model, const Control& control,
                    const SimulationGrid& grid, Eigen::Index path_count, std::uint64_t seed,
                    Scheme scheme, int threads) {
    const GaussianStream stream(seed, rng_streams::simulation);
    const Eigen::Index d = model.dimension;
    detail::NoiseFn noise = [stream, d](Eigen::Index path, Eigen::Index step, double* out) {
        stream.fill_normals(static_cast<std::uint64_t>(path),
                            static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(d + 1),
                            out, static_cast<std::size_t>(d + 1));
    };
    return detail::simulate_with_noise(model, control, grid, path_count, seed, scheme, noise,
                                       threads);
}

PathBundle resample_with_crn(const PathBundle& bundle, const Control& new_control,
                             int threads) {
    if (!bundle.model) {
        throw std::invalid_argument("resample_with_crn: bundle carries no model");
    }
    return simulate(*bundle.model, new_control, bundle.grid, bundle.path_count(), bundle.seed,
                    bundle.scheme, threads);
}

MomentReport sup_norm_stats(const PathBundle& bundle, double exponent) {
    if (!(exponent > 0.0)) throw std::invalid_argument("sup_norm_stats: exponent must be > 0");
    const Eigen::Index paths = bundle.path_count();
    const Eigen::Index n = bundle.grid.steps;
    const Eigen::Index d = bundle.dimension;

    double sum = 0.0;
    double sumsq = 0.0;
    for (Eigen::Index p = 0; p < paths; ++p) {
        double sup2 = 0.0;
        for (Eigen::Index i = 0; i <= n; ++i) {
            double norm2 = bundle.x(i, p) * bundle.x(i, p);
            for (Eigen::Index k = 0; k < d; ++k) {
                const double v = bundle.y(i * d + k, p);
                norm2 += v * v;
            }
            sup2 = std::max(sup2, norm2);
        }
        const double val = std::pow(std::sqrt(sup2), exponent);
        sum += val;
        sumsq += val * val;
    }
    const double mean = sum / static_cast<double>(paths);
    double se = 0.0;
    if (paths > 1) {
        const double var =
            std::max(0.0, (sumsq - static_cast<double>(paths) * mean * mean) /
                              static_cast<double>(paths - 1));
        se = std::sqrt(var / static_cast<double>(paths));
    }
    return {exponent, mean, se, paths};
}

HolderReport holder_increment_check(const MarketModel& model, const Control& control,
                                    const SimulationGrid& grid, Eigen::Index path_count,
                                    std::uint64_t seed, double eta,
                                    const std::vector<Eigen::Index>& lag_set, int threads) {
    if (!(eta >= 1.0)) throw std::invalid_argument("holder_increment_check: eta must be >= 1");
    if (lag_set.size() < 3) {
        throw ConfigError("holder_increment_check: need at least 3 lags to fit a slope");
    }
    for (const auto lag : lag_set) {
        if (lag < 1 || lag > grid.steps) {
            throw std::invalid_argument("holder_increment_check: lag outside the grid");
        }
    }

    const PathBundle bundle =
        simulate(model, control, grid, path_count, seed, Scheme::exact_exponential, threads);
    const Eigen::Index n = grid.steps;
    const Eigen::Index d = bundle.dimension;

    HolderReport report;
    report.eta = eta;
    std::vector<Eigen::Index> lags(lag_set);
    std::sort(lags.begin(), lags.end());

    for (const auto lag : lags) {
        double sum = 0.0;
        double sumsq = 0.0;
        for (Eigen::Index p = 0; p < path_count; ++p) {
            double acc = 0.0;
            const Eigen::Index pairs = n - lag + 1;
            for (Eigen::Index i = 0; i + lag <= n; ++i) {
                double norm2 = 0.0;
                const double dx = bundle.x(i + lag, p) - bundle.x(i, p);
                norm2 += dx * dx;
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double dy = bundle.y((i + lag) * d + k, p) - bundle.y(i * d + k, p);
                    norm2 += dy * dy;
                }
                acc += std::pow(std::sqrt(norm2), eta);
            }
            acc /= static_cast<double>(pairs);
            sum += acc;
            sumsq += acc * acc;
        }
        const double mean = sum / static_cast<double>(path_count);
        double se = 0.0;
        if (path_count > 1) {
            const double var = std::max(
                0.0, (sumsq - static_cast<double>(path_count) * mean * mean) /
                         static_cast<double>(path_count - 1));
            se = std::sqrt(var / static_cast<double>(path_count));
        }
        report.lags.push_back({lag, static_cast<double>(lag) * grid.dt(), mean, se});
    }

    // Log-log slope; undefined when any moment vanishes (frozen dynamics).
    const bool fittable =
        std::all_of(report.lags.begin(), report.lags.end(),
                    [](const HolderLag& l) { return l.moment > 0.0; });
    if (fittable) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const auto m = static_cast<double>(report.lags.size());
        for (const auto& l : report.lags) {
            const double lx = std::log(l.lag_time);
            const double ly = std::log(l.moment);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        report.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    } else {
        report.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    }

    const HolderLag& top = report.lags.back();
    report.implied_constant =
        top.moment / std::pow(top.lag_time, eta / 2.0);
    for (const auto& l : report.lags) {
        const double envelope = report.implied_constant * std::pow(l.lag_time, eta / 2.0);
        if (l.moment > envelope + 3.0 * l.standard_error) {
            std::ostringstream os;
            os << "lag " << l.lag_steps << ": moment " << l.moment
               << " exceeds envelope " << envelope << " + 3 SE (" << l.standard_error << ")";
            report.violations.push_back(os.str());
        }
    }
    return report;
}

}  // namespace prospect
