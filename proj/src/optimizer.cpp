#include "prospect/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "prospect/errors.hpp"
#include "prospect/rng.hpp"

namespace prospect {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

Eigen::Index time_segment(double t, double horizon, Eigen::Index segments) {
    const auto s =
        static_cast<Eigen::Index>(std::floor(t / horizon * static_cast<double>(segments)));
    return std::min(segments - 1, std::max<Eigen::Index>(0, s));
}

Eigen::Index y_bin(double y, const std::vector<double>& edges) {
    return static_cast<Eigen::Index>(std::upper_bound(edges.begin(), edges.end(), y) -
                                     edges.begin());
}

}  // namespace

PolicyFamily PolicyFamily::constant() {
    PolicyFamily f;
    f.kind_ = FamilyKind::constant;
    f.parameter_count_ = 1;
    return f;
}

PolicyFamily PolicyFamily::piecewise_constant_time(Eigen::Index segments, double horizon) {
    if (segments < 1) throw std::invalid_argument("piecewise_constant_time: segments >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("piecewise_constant_time: horizon > 0");
    PolicyFamily f;
    f.kind_ = FamilyKind::piecewise_constant_time;
    f.time_segments_ = segments;
    f.horizon_ = horizon;
    f.parameter_count_ = segments;
    return f;
}

PolicyFamily PolicyFamily::feedback_grid(Eigen::Index time_segments, double horizon,
                                         std::vector<double> y_bin_edges) {
    if (time_segments < 1) throw std::invalid_argument("feedback_grid: time_segments >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("feedback_grid: horizon > 0");
    if (!std::is_sorted(y_bin_edges.begin(), y_bin_edges.end())) {
        throw std::invalid_argument("feedback_grid: y_bin_edges must be sorted");
    }
    PolicyFamily f;
    f.kind_ = FamilyKind::feedback_grid;
    f.time_segments_ = time_segments;
    f.horizon_ = horizon;
    f.y_bin_edges_ = std::move(y_bin_edges);
    f.parameter_count_ = time_segments * static_cast<Eigen::Index>(f.y_bin_edges_.size() + 1);
    return f;
}

PolicyFamily PolicyFamily::feedback_from_pilot(const MarketModel& model,
                                               const SimulationGrid& grid,
                                               Eigen::Index pilot_paths, std::uint64_t seed,
                                               Eigen::Index time_segments,
                                               Eigen::Index y_bins) {
    if (y_bins < 2) throw std::invalid_argument("feedback_from_pilot: y_bins >= 2");
    const PathBundle pilot = simulate(model, Policy::constant(0.0), grid, pilot_paths, seed,
                                      Scheme::exact_exponential);
    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(pilot_paths * (grid.steps + 1)));
    for (Eigen::Index p = 0; p < pilot_paths; ++p) {
        for (Eigen::Index i = 0; i <= grid.steps; ++i) pooled.push_back(pilot.y_at(p, i, 0));
    }
    std::sort(pooled.begin(), pooled.end());
    std::vector<double> edges;
    for (Eigen::Index q = 1; q < y_bins; ++q) {
        const auto idx = static_cast<std::size_t>(
            std::llround(static_cast<double>(q) / static_cast<double>(y_bins) *
                         static_cast<double>(pooled.size() - 1)));
        edges.push_back(pooled[idx]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return feedback_grid(time_segments, grid.horizon, std::move(edges));
}

Policy PolicyFamily::instantiate(const Eigen::VectorXd& parameters) const {
    if (parameters.size() != parameter_count_) {
        throw std::invalid_argument("PolicyFamily: wrong parameter count");
    }
    const Eigen::VectorXd p = parameters.unaryExpr([](double v) { return clamp01(v); });

    switch (kind_) {
        case FamilyKind::constant:
            return Policy::constant(p[0]);
        case FamilyKind::piecewise_constant_time: {
            const Eigen::Index segments = time_segments_;
            const double horizon = horizon_;
            return {"piecewise_time",
                    [p, segments, horizon](double t, const PathView&, const PathView&) {
                        return p[time_segment(t, horizon, segments)];
                    }};
        }
        case FamilyKind::feedback_grid: {
            const Eigen::Index segments = time_segments_;
            const double horizon = horizon_;
            const auto edges = y_bin_edges_;
            const auto bins = static_cast<Eigen::Index>(edges.size() + 1);
            return {"feedback_grid",
                    [p, segments, horizon, edges, bins](double t, const PathView& y,
                                                        const PathView&) {
                        const Eigen::Index ts = time_segment(t, horizon, segments);
                        const Eigen::Index yb = y_bin(y.end_scalar(0), edges);
                        return p[ts * bins + yb];
                    }};
        }
    }
    throw std::logic_error("PolicyFamily: unknown kind");
}

CptReport evaluate_policy(const PolicyFamily& family, const Eigen::VectorXd& parameters,
                          const MarketModel& model, const Preferences& prefs,
                          const SimulationGrid& grid, Eigen::Index path_count,
                          std::uint64_t seed, int threads) {
    const Policy policy = family.instantiate(parameters);
    const PathBundle bundle = simulate(model, policy, grid, path_count, seed,
                                       Scheme::exact_exponential, threads);
    return evaluate(bundle, prefs);
}

namespace {

// Shared evaluation bookkeeping: deduplicated, budgeted, traced.
class ObjectiveTracker {
public:
    ObjectiveTracker(const PolicyFamily& family, const MarketModel& model,
                     const Preferences& prefs, const SimulationGrid& grid,
                     Eigen::Index path_count, std::uint64_t seed, Eigen::Index budget,
                     int threads, OptimizationResult& result)
        : family_(family), model_(model), prefs_(prefs), grid_(grid),
          path_count_(path_count), seed_(seed), budget_(budget), threads_(threads),
          result_(result) {}

    bool exhausted() const { return result_.evaluations >= budget_; }

    // Returns the objective value; evaluations are cached by exact parameter
    // bits so re-visits are free. Throws BudgetExhausted via flag instead:
    // callers must check exhausted() first.
    double value(const Eigen::VectorXd& params) {
        const Eigen::VectorXd clamped = params.unaryExpr([](double v) { return clamp01(v); });
        std::vector<double> key(clamped.data(), clamped.data() + clamped.size());
        if (const auto it = cache_.find(key); it != cache_.end()) return it->second;

        const CptReport report =
            evaluate_policy(family_, clamped, model_, prefs_, grid_, path_count_, seed_,
                            threads_);
        if (!std::isfinite(report.v)) {
            std::ostringstream os;
            os << "optimize: non-finite objective (v = " << report.v << ") at parameters [";
            for (Eigen::Index i = 0; i < clamped.size(); ++i) {
                os << (i ? ", " : "") << clamped[i];
            }
            os << "]";
            throw NumericalError(os.str());
        }
        result_.evaluations += 1;
        if (result_.trace.empty() || report.v > best_) {
            best_ = report.v;
            result_.best_parameters = clamped;
            result_.best_value = report;
        }
        result_.trace.push_back({result_.evaluations, report.v, report.se_v, best_, clamped});
        cache_.emplace(std::move(key), report.v);
        return report.v;
    }

    double best() const { return best_; }

private:
    const PolicyFamily& family_;
    const MarketModel& model_;
    const Preferences& prefs_;
    const SimulationGrid& grid_;
    Eigen::Index path_count_;
    std::uint64_t seed_;
    Eigen::Index budget_;
    int threads_;
    OptimizationResult& result_;
    std::map<std::vector<double>, double> cache_;
    double best_ = -std::numeric_limits<double>::infinity();
};

void run_grid_refine(ObjectiveTracker& obj, Eigen::Index dim) {
    Eigen::VectorXd incumbent = Eigen::VectorXd::Constant(dim, 0.5);
    // First sweep scans the coarse grid per coordinate, later sweeps halve
    // the resolution around the incumbent.
    double h = 0.25;
    bool first = true;
    while (!obj.exhausted() && h >= 1.0 / 1024.0) {
        for (Eigen::Index c = 0; c < dim && !obj.exhausted(); ++c) {
            std::vector<double> candidates;
            if (first) {
                for (double v = 0.0; v <= 1.0 + 1e-12; v += h) candidates.push_back(clamp01(v));
            } else {
                for (int k = -2; k <= 2; ++k) candidates.push_back(clamp01(incumbent[c] + k * h));
            }
            double best_v = -std::numeric_limits<double>::infinity();
            double best_x = incumbent[c];
            for (const double v : candidates) {
                if (obj.exhausted()) break;
                Eigen::VectorXd probe = incumbent;
                probe[c] = v;
                const double val = obj.value(probe);
                if (val > best_v) {
                    best_v = val;
                    best_x = v;
                }
            }
            incumbent[c] = best_x;
        }
        first = false;
        h *= 0.5;
    }
}

void run_nelder_mead(ObjectiveTracker& obj, Eigen::Index dim) {
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::vector<Eigen::VectorXd> simplex;
    std::vector<double> values;
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(dim, 0.5);
    simplex.push_back(x0);
    for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::VectorXd xi = x0;
        xi[i] = clamp01(xi[i] + 0.3);
        simplex.push_back(xi);
    }
    for (const auto& x : simplex) {
        if (obj.exhausted()) return;
        values.push_back(obj.value(x));
    }

    const auto order = [&] {
        std::vector<std::size_t> idx(simplex.size());
        std::iota(idx.begin(), idx.end(), 0u);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
        std::vector<Eigen::VectorXd> s2;
        std::vector<double> v2;
        for (const auto i : idx) {
            s2.push_back(simplex[i]);
            v2.push_back(values[i]);
        }
        simplex = std::move(s2);
        values = std::move(v2);
    };

    while (!obj.exhausted()) {
        order();
        // Diameter stop: the simplex has collapsed to numerical resolution.
        double diam = 0.0;
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            diam = std::max(diam, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
        }
        if (diam < 1e-4) break;

        const std::size_t worst = simplex.size() - 1;
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i];
        centroid /= static_cast<double>(worst);

        const auto clamped = [&](const Eigen::VectorXd& x) {
            return x.unaryExpr([](double v) { return clamp01(v); }).eval();
        };

        const Eigen::VectorXd reflected = clamped(centroid + alpha * (centroid - simplex[worst]));
        if (obj.exhausted()) break;
        const double fr = obj.value(reflected);
        if (fr > values[0]) {
            const Eigen::VectorXd expanded =
                clamped(centroid + gamma * (reflected - centroid));
            if (obj.exhausted()) break;
            const double fe = obj.value(expanded);
            if (fe > fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if (fr > values[worst - 1]) {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            const Eigen::VectorXd contracted =
                clamped(centroid + rho * (simplex[worst] - centroid));
            if (obj.exhausted()) break;
            const double fc = obj.value(contracted);
            if (fc > values[worst]) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    simplex[i] = clamped(simplex[0] + sigma * (simplex[i] - simplex[0]));
                    if (obj.exhausted()) return;
                    values[i] = obj.value(simplex[i]);
                }
            }
        }
    }
}

void run_cross_entropy(ObjectiveTracker& obj, Eigen::Index dim, std::uint64_t seed) {
    const Eigen::Index population = std::max<Eigen::Index>(16, 4 * dim);
    const auto elite_count =
        std::max<Eigen::Index>(2, static_cast<Eigen::Index>(0.2 * static_cast<double>(population)));
    const GaussianStream g(seed, rng_streams::optimizer);

    Eigen::VectorXd mu = Eigen::VectorXd::Constant(dim, 0.5);
    Eigen::VectorXd sigma = Eigen::VectorXd::Constant(dim, 0.3);

    // Boundary-clamped duplicates are cache hits and consume no budget, so
    // the loop needs its own cap.
    const Eigen::Index max_generations = 1000;
    for (Eigen::Index generation = 0; !obj.exhausted() && generation < max_generations;
         ++generation) {
        std::vector<std::pair<double, Eigen::VectorXd>> scored;
        for (Eigen::Index member = 0; member < population && !obj.exhausted(); ++member) {
            Eigen::VectorXd candidate(dim);
            for (Eigen::Index c = 0; c < dim; ++c) {
                const double z = g.normal(static_cast<std::uint64_t>(generation),
                                          static_cast<std::uint64_t>(member * dim + c));
                candidate[c] = clamp01(mu[c] + sigma[c] * z);
            }
            scored.emplace_back(obj.value(candidate), candidate);
        }
        if (scored.size() < static_cast<std::size_t>(elite_count)) break;
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (Eigen::Index c = 0; c < dim; ++c) {
            double mean = 0.0;
            for (Eigen::Index e = 0; e < elite_count; ++e) mean += scored[e].second[c];
            mean /= static_cast<double>(elite_count);
            double var = 0.0;
            for (Eigen::Index e = 0; e < elite_count; ++e) {
                const double dv = scored[e].second[c] - mean;
                var += dv * dv;
            }
            var /= static_cast<double>(elite_count);
            mu[c] = mean;
            sigma[c] = std::max(std::sqrt(var), 0.01);
        }
    }
}

}  // namespace

OptimizationResult optimize(const PolicyFamily& family, const MarketModel& model,
                            const Preferences& prefs, const SimulationGrid& grid,
                            Eigen::Index path_count, std::uint64_t seed, Eigen::Index budget,
                            Method method, int threads) {
    const Eigen::Index dim = family.parameter_count();
    if (budget < dim + 1) {
        throw std::invalid_argument("optimize: budget must be at least dimension + 1");
    }
    OptimizationResult result;
    result.seed = seed;
    ObjectiveTracker obj(family, model, prefs, grid, path_count, seed, budget, threads,
                         result);
    switch (method) {
        case Method::grid_refine:
            run_grid_refine(obj, dim);
            break;
        case Method::nelder_mead:
            run_nelder_mead(obj, dim);
            break;
        case Method::cross_entropy:
            run_cross_entropy(obj, dim, seed);
            break;
    }
    return result;
}

}  // namespace prospect
