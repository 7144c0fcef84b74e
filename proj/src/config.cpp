#include "prospect/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "prospect/errors.hpp"

namespace prospect {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_text(text.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!cfg.entries_.count(section)) {
                cfg.section_order_.push_back(section);
                cfg.entries_[section];
                cfg.key_order_[section];
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (section.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": key '" + key +
                              "' appears before any [section]");
        }
        if (cfg.entries_[section].count(key)) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                              section + "." + key + "'");
        }
        cfg.entries_[section][key] = {value, line_no, false};
        cfg.key_order_[section].push_back(key);
    }
    return cfg;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section,
                                          const std::string& key) const {
    const auto sit = entries_.find(section);
    if (sit == entries_.end()) return nullptr;
    const auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    kit->second.consumed = true;
    return &kit->second;
}

const ConfigFile::Entry& ConfigFile::require(const std::string& section,
                                             const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) {
        throw ConfigError(origin_ + ": missing required key '" + section + "." + key + "'");
    }
    return *e;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    return require(section, key).value;
}

std::string ConfigFile::get_string_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + section + "." +
                          key + "' is not a number: '" + e.value + "'");
    }
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
    return find(section, key) ? get_double(section, key) : fallback;
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + section + "." +
                          key + "' is not an integer: '" + e.value + "'");
    }
}

std::int64_t ConfigFile::get_int_or(const std::string& section, const std::string& key,
                                    std::int64_t fallback) const {
    return find(section, key) ? get_int(section, key) : fallback;
}

std::vector<double> ConfigFile::get_doubles(const std::string& section,
                                            const std::string& key) const {
    const Entry& e = require(section, key);
    std::vector<double> out;
    std::istringstream in(e.value);
    std::string token;
    while (in >> token) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(token, &pos));
            if (pos != token.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + section +
                              "." + key + "' contains a non-numeric entry: '" + token + "'");
        }
    }
    if (out.empty()) {
        throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + section + "." +
                          key + "' is empty");
    }
    return out;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
    if (!entries_.count(section)) {
        section_order_.push_back(section);
        entries_[section];
        key_order_[section];
    }
    if (!entries_[section].count(key)) key_order_[section].push_back(key);
    entries_[section][key] = {value, 0, true};
}

std::string ConfigFile::serialize() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& section : section_order_) {
        if (!first) os << "\n";
        first = false;
        os << "[" << section << "]\n";
        for (const auto& key : key_order_.at(section)) {
            os << key << " = " << entries_.at(section).at(key).value << "\n";
        }
    }
    return os.str();
}

void ConfigFile::require_all_consumed(const std::vector<std::string>& ignored_sections) const {
    for (const auto& section : section_order_) {
        if (std::find(ignored_sections.begin(), ignored_sections.end(), section) !=
            ignored_sections.end()) {
            continue;
        }
        for (const auto& key : key_order_.at(section)) {
            const Entry& e = entries_.at(section).at(key);
            if (!e.consumed) {
                throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown key '" +
                                  section + "." + key + "'");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Object builders
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void bad_value(const ConfigFile& cfg, const std::string& section,
                            const std::string& key, const std::string& what) {
    throw ConfigError(cfg.origin() + ": key '" + section + "." + key + "': " + what);
}

ScalarFunctional scalar_functional(const ConfigFile& cfg, const std::string& section,
                                   const std::string& prefix) {
    const std::string kind = cfg.get_string(section, prefix + ".kind");
    ScalarFunctional f;
    if (kind == "constant") {
        f = functionals::constant(cfg.get_double(section, prefix + ".value"));
    } else if (kind == "affine_state") {
        f = functionals::affine_state(cfg.get_double(section, prefix + ".intercept"),
                                      cfg.get_double(section, prefix + ".slope"),
                                      cfg.get_double(section, prefix + ".min"),
                                      cfg.get_double(section, prefix + ".max"));
    } else if (kind == "running_max") {
        f = functionals::running_max_norm(cfg.get_double_or(section, prefix + ".scale", 1.0),
                                          cfg.get_double(section, prefix + ".cap"));
    } else if (kind == "state_integral") {
        f = functionals::state_integral(cfg.get_double_or(section, prefix + ".scale", 1.0),
                                        cfg.get_double(section, prefix + ".min"),
                                        cfg.get_double(section, prefix + ".max"));
    } else if (kind == "tanh_state") {
        f = functionals::tanh_state(cfg.get_double(section, prefix + ".level"),
                                    cfg.get_double(section, prefix + ".amplitude"),
                                    cfg.get_double(section, prefix + ".slope"),
                                    cfg.get_double_or(section, prefix + ".center", 0.0));
    } else {
        bad_value(cfg, section, prefix + ".kind", "unknown coefficient kind '" + kind + "'");
    }
    if (cfg.has(section, prefix + ".bound")) {
        const double bound = cfg.get_double(section, prefix + ".bound");
        f = ScalarFunctional(f.name(),
                             [f](double t, const PathView& y) { return f(t, y); }, bound);
    }
    return f;
}

}  // namespace

MarketModel model_from_config(const ConfigFile& cfg) {
    MarketModel model;
    const std::string variant = cfg.get_string_or("model", "variant", "base");
    if (variant == "base") {
        model.variant = Variant::base;
    } else if (variant == "extended") {
        model.variant = Variant::extended;
    } else {
        bad_value(cfg, "model", "variant", "must be 'base' or 'extended'");
    }
    model.horizon = cfg.get_double("model", "horizon");
    model.dimension = cfg.get_int_or("model", "dimension", 1);
    model.initial_wealth = cfg.get_double("model", "initial_wealth");
    const std::vector<double> y0 = cfg.get_doubles("model", "initial_factor");
    model.initial_factor =
        Eigen::Map<const Eigen::VectorXd>(y0.data(), static_cast<Eigen::Index>(y0.size()));

    model.theta = scalar_functional(cfg, "model", "theta");
    model.lambda = scalar_functional(cfg, "model", "lambda");
    model.nu = functionals::isotropic_vector(scalar_functional(cfg, "model", "nu"),
                                             model.dimension);
    model.kappa = functionals::isotropic_matrix(scalar_functional(cfg, "model", "kappa"),
                                                model.dimension);
    if (model.variant == Variant::extended) {
        model.rho = scalar_functional(cfg, "model", "rho");
        const std::string rate_kind = cfg.get_string_or("model", "rate.kind", "constant");
        if (rate_kind != "constant") {
            bad_value(cfg, "model", "rate.kind", "only 'constant' rates are supported");
        }
        const double r = cfg.get_double("model", "rate.value");
        model.rate = [r](double) { return r; };
        model.rate_bound = std::abs(r);
    }
    model.uniqueness_in_law =
        cfg.get_string_or("model", "uniqueness_in_law", "declared") != "false";
    model.require_valid_shape();
    return model;
}

namespace {

std::function<double(double)> utility_from(const ConfigFile& cfg, const std::string& prefix) {
    const std::string kind = cfg.get_string("preferences", prefix + ".kind");
    if (kind == "power") {
        return preferences::power_utility(cfg.get_double("preferences", prefix + ".coef"),
                                          cfg.get_double("preferences", prefix + ".exponent"));
    }
    if (kind == "linear") {
        return preferences::power_utility(
            cfg.get_double_or("preferences", prefix + ".coef", 1.0), 1.0);
    }
    bad_value(cfg, "preferences", prefix + ".kind", "unknown utility kind '" + kind + "'");
}

std::function<double(double)> distortion_from(const ConfigFile& cfg,
                                              const std::string& prefix, double* gamma_out) {
    const std::string kind = cfg.get_string("preferences", prefix + ".kind");
    if (kind == "identity") {
        if (gamma_out) *gamma_out = 1.0;
        return preferences::identity_distortion();
    }
    if (kind == "power") {
        const double e = cfg.get_double("preferences", prefix + ".exponent");
        if (gamma_out) *gamma_out = e;
        return preferences::power_distortion(e);
    }
    if (kind == "tversky_kahneman") {
        const double delta = cfg.get_double("preferences", prefix + ".delta");
        if (gamma_out) *gamma_out = delta;
        return preferences::tversky_kahneman_distortion(delta);
    }
    bad_value(cfg, "preferences", prefix + ".kind", "unknown distortion kind '" + kind + "'");
}

}  // namespace

Preferences preferences_from_config(const ConfigFile& cfg) {
    Preferences prefs;
    prefs.utilities.u_plus = utility_from(cfg, "u_plus");
    prefs.utilities.u_minus = utility_from(cfg, "u_minus");
    prefs.utilities.k_plus = cfg.get_double_or(
        "preferences", "u_plus.k", cfg.get_double_or("preferences", "u_plus.coef", 1.0));
    prefs.utilities.alpha = cfg.get_double_or(
        "preferences", "u_plus.alpha",
        cfg.get_double_or("preferences", "u_plus.exponent", 1.0));

    double gamma_plus = 1.0;
    prefs.distortions.w_plus = distortion_from(cfg, "w_plus", &gamma_plus);
    prefs.distortions.w_minus = distortion_from(cfg, "w_minus", nullptr);
    prefs.distortions.gamma = cfg.get_double_or("preferences", "w_plus.gamma", gamma_plus);
    prefs.distortions.g_plus = cfg.get_double_or("preferences", "w_plus.g", 1.0);

    const std::string bkind = cfg.get_string("preferences", "benchmark.kind");
    const double theta_star = cfg.get_double("preferences", "benchmark.theta_star");
    if (bkind == "constant") {
        prefs.benchmark = preferences::constant_benchmark(
            cfg.get_double("preferences", "benchmark.value"), theta_star);
    } else if (bkind == "terminal_relu") {
        prefs.benchmark = preferences::terminal_relu_benchmark(
            cfg.get_double("preferences", "benchmark.intercept"),
            cfg.get_double("preferences", "benchmark.slope"), theta_star);
    } else if (bkind == "running_max") {
        prefs.benchmark = preferences::running_max_benchmark(
            cfg.get_double_or("preferences", "benchmark.scale", 1.0), theta_star);
    } else {
        bad_value(cfg, "preferences", "benchmark.kind", "unknown benchmark kind '" + bkind + "'");
    }
    return prefs;
}

RunSettings run_settings_from_config(const ConfigFile& cfg, const MarketModel& model) {
    RunSettings rs;
    rs.grid.steps = cfg.get_int("grid", "steps");
    rs.grid.horizon = model.horizon;
    rs.grid.require_valid();
    rs.paths = cfg.get_int("grid", "paths");
    if (rs.paths < 1) bad_value(cfg, "grid", "paths", "must be >= 1");
    rs.seed = static_cast<std::uint64_t>(cfg.get_int("grid", "seed"));
    const std::string scheme = cfg.get_string_or("grid", "scheme", "exact_exponential");
    if (scheme == "exact_exponential") {
        rs.scheme = Scheme::exact_exponential;
    } else if (scheme == "euler") {
        rs.scheme = Scheme::euler;
    } else {
        bad_value(cfg, "grid", "scheme", "must be 'exact_exponential' or 'euler'");
    }
    return rs;
}

namespace {

Policy policy_from(const ConfigFile& cfg, const std::string& section,
                   const std::string& prefix, const MarketModel& model) {
    const std::string kind = cfg.get_string(section, prefix + ".kind");
    if (kind == "constant") {
        return Policy::constant(cfg.get_double(section, prefix + ".value"));
    }
    if (kind == "piecewise_time") {
        const std::vector<double> values = cfg.get_doubles(section, prefix + ".values");
        const double horizon = model.horizon;
        const auto segments = static_cast<Eigen::Index>(values.size());
        return {"piecewise_time", [values, horizon, segments](double t, const PathView&,
                                                              const PathView&) {
                    auto s = static_cast<Eigen::Index>(
                        std::floor(t / horizon * static_cast<double>(segments)));
                    s = std::min(segments - 1, std::max<Eigen::Index>(0, s));
                    return values[static_cast<std::size_t>(s)];
                }};
    }
    bad_value(cfg, section, prefix + ".kind", "unknown policy kind '" + kind + "'");
}

}  // namespace

Control control_from_config(const ConfigFile& cfg, const MarketModel& model) {
    const std::string kind = cfg.get_string_or("control", "kind", "policy");
    if (kind == "policy") {
        return policy_from(cfg, "control", "policy", model);
    }
    if (kind == "relaxed") {
        const Policy l = policy_from(cfg, "control", "l", model);
        const Policy m = policy_from(cfg, "control", "m", model);
        return RelaxedControl("config",
                              [l](double t, const PathView& y, const PathView& x) {
                                  return l.raw(t, y, x);
                              },
                              [m](double t, const PathView& y, const PathView& x) {
                                  return m.raw(t, y, x);
                              });
    }
    bad_value(cfg, "control", "kind", "must be 'policy' or 'relaxed'");
}

OptimizeSettings optimize_settings_from_config(const ConfigFile& cfg) {
    OptimizeSettings os;
    const std::string family = cfg.get_string_or("optimize", "family", "constant");
    if (family == "constant") {
        os.family = FamilyKind::constant;
    } else if (family == "piecewise_time") {
        os.family = FamilyKind::piecewise_constant_time;
    } else if (family == "feedback_grid") {
        os.family = FamilyKind::feedback_grid;
    } else {
        bad_value(cfg, "optimize", "family", "unknown family '" + family + "'");
    }
    os.segments = cfg.get_int_or("optimize", "segments", 4);
    os.y_bins = cfg.get_int_or("optimize", "y_bins", 8);
    os.pilot_paths = cfg.get_int_or("optimize", "pilot_paths", 2048);
    os.budget = cfg.get_int_or("optimize", "budget", 40);
    const std::string method = cfg.get_string_or("optimize", "method", "grid_refine");
    if (method == "grid_refine") {
        os.method = Method::grid_refine;
    } else if (method == "nelder_mead") {
        os.method = Method::nelder_mead;
    } else if (method == "cross_entropy") {
        os.method = Method::cross_entropy;
    } else {
        bad_value(cfg, "optimize", "method", "unknown method '" + method + "'");
    }
    return os;
}

VerifySettings verify_settings_from_config(const ConfigFile& cfg) {
    VerifySettings vs;
    vs.convexity_samples = static_cast<int>(cfg.get_int_or("verify", "convexity_samples", 10000));
    vs.support_probes = static_cast<int>(cfg.get_int_or("verify", "support_probes", 200));
    vs.support_grid = static_cast<int>(cfg.get_int_or("verify", "support_grid", 1000));
    vs.dominance_controls = static_cast<int>(cfg.get_int_or("verify", "dominance_controls", 20));
    vs.moment_controls = static_cast<int>(cfg.get_int_or("verify", "moment_controls", 10));
    vs.paths = cfg.get_int_or("verify", "paths", 4096);
    vs.tolerance = cfg.get_double_or("verify", "tolerance", 1e-10);
    return vs;
}

}  // namespace prospect
