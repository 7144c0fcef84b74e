#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prospect/controls.hpp"
#include "prospect/cpt.hpp"
#include "prospect/market_model.hpp"
#include "prospect/optimizer.hpp"

namespace prospect {

// Sectioned key-value run configuration:
//
//   [section]
//   key = value        # comment
//
// Keys are dotted lowercase identifiers; values are scalars or
// space-separated lists. Parse and lookup errors carry the origin, the line
// and the offending key.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text,
                                 const std::string& origin = "<config>");

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    std::int64_t get_int_or(const std::string& section, const std::string& key,
                            std::int64_t fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

    // Inserts or replaces a value (used for --seed overrides); the change is
    // reflected by serialize().
    void set(const std::string& section, const std::string& key, const std::string& value);

    // Canonical text that reparses to the same configuration.
    std::string serialize() const;

    // Throws ConfigError naming the first key that was never read; sections
    // listed in `ignored_sections` are exempt (e.g. the [run] provenance
    // block of run.meta files).
    void require_all_consumed(const std::vector<std::string>& ignored_sections = {"run"}) const;

    const std::string& origin() const { return origin_; }

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };
    const Entry* find(const std::string& section, const std::string& key) const;
    const Entry& require(const std::string& section, const std::string& key) const;

    std::string origin_;
    std::vector<std::string> section_order_;
    std::map<std::string, std::vector<std::string>> key_order_;
    std::map<std::string, std::map<std::string, Entry>> entries_;
};

struct RunSettings {
    SimulationGrid grid;
    Eigen::Index paths = 0;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::exact_exponential;
};

struct OptimizeSettings {
    FamilyKind family = FamilyKind::constant;
    Eigen::Index segments = 4;
    Eigen::Index y_bins = 8;
    Eigen::Index pilot_paths = 2048;
    Eigen::Index budget = 40;
    Method method = Method::grid_refine;
};

struct VerifySettings {
    int convexity_samples = 10000;
    int support_probes = 200;
    int support_grid = 1000;
    int dominance_controls = 20;
    int moment_controls = 10;
    Eigen::Index paths = 4096;
    double tolerance = 1e-10;
};

MarketModel model_from_config(const ConfigFile& cfg);
Preferences preferences_from_config(const ConfigFile& cfg);
RunSettings run_settings_from_config(const ConfigFile& cfg, const MarketModel& model);
Control control_from_config(const ConfigFile& cfg, const MarketModel& model);
OptimizeSettings optimize_settings_from_config(const ConfigFile& cfg);
VerifySettings verify_settings_from_config(const ConfigFile& cfg);

}  // namespace prospect
