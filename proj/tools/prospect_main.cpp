// Command-line front end: load a run configuration, execute one of
// simulate / evaluate / verify / optimize, and write CSV outputs plus a
// run.meta header that regenerates the run bit-exactly.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "prospect/config.hpp"
#include "prospect/errors.hpp"
#include "prospect/io.hpp"
#include "prospect/optimizer.hpp"
#include "prospect/rng.hpp"
#include "prospect/verify.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::int64_t seed_override = -1;
    bool has_seed_override = false;
    int threads = 1;
};

struct LoadedRun {
    prospect::ConfigFile config;
    prospect::MarketModel model;
    prospect::RunSettings run;
    std::string meta;  // resolved config + [run] provenance
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed_override, "override grid.seed")
        ->each([&](const std::string&) { opts.has_seed_override = true; });
    cmd->add_option("--threads", opts.threads, "worker cap (results are identical)");
}

LoadedRun load_run(const CommonOptions& opts, const std::string& command) {
    LoadedRun lr{prospect::ConfigFile::parse_file(opts.config_path), {}, {}, {}};
    if (opts.has_seed_override) {
        lr.config.set("grid", "seed", std::to_string(opts.seed_override));
    }
    lr.model = prospect::model_from_config(lr.config);
    lr.run = prospect::run_settings_from_config(lr.config, lr.model);

    prospect::ConfigFile resolved = lr.config;
    resolved.set("run", "command", command);
    lr.meta = resolved.serialize();
    return lr;
}

void validate_or_throw(const prospect::MarketModel& model, std::uint64_t seed) {
    const prospect::ValidationReport report = prospect::validate_model(model, 256, seed);
    if (!report.ok()) {
        throw prospect::ModelError(report.summary());
    }
}

std::string out_path(const CommonOptions& opts, const std::string& name) {
    std::filesystem::create_directories(opts.out_dir);
    return (std::filesystem::path(opts.out_dir) / name).string();
}

int cmd_simulate(const CommonOptions& opts) {
    LoadedRun lr = load_run(opts, "simulate");
    validate_or_throw(lr.model, lr.run.seed);
    const prospect::Control control = prospect::control_from_config(lr.config, lr.model);
    lr.config.require_all_consumed({"run", "preferences", "optimize", "verify"});

    const prospect::PathBundle bundle =
        prospect::simulate(lr.model, control, lr.run.grid, lr.run.paths, lr.run.seed,
                           lr.run.scheme, opts.threads);
    prospect::write_text_file(out_path(opts, "paths.csv"),
                              prospect::path_bundle_csv(bundle, lr.meta));
    prospect::write_text_file(out_path(opts, "run.meta"), lr.meta);
    std::cout << prospect::terminal_summary_block(bundle);
    return 0;
}

int cmd_evaluate(const CommonOptions& opts) {
    LoadedRun lr = load_run(opts, "evaluate");
    validate_or_throw(lr.model, lr.run.seed);
    const prospect::Control control = prospect::control_from_config(lr.config, lr.model);
    const prospect::Preferences prefs = prospect::preferences_from_config(lr.config);
    lr.config.require_all_consumed({"run", "optimize", "verify"});

    const prospect::PreferenceReport fn_report = prospect::validate_preferences(prefs, 256);
    if (!fn_report.ok()) {
        throw prospect::PreferenceError(fn_report.summary());
    }
    const prospect::PathBundle bundle =
        prospect::simulate(lr.model, control, lr.run.grid, lr.run.paths, lr.run.seed,
                           lr.run.scheme, opts.threads);
    const prospect::PreferenceReport full_report =
        prospect::validate_preferences(prefs, 256, bundle);
    if (!full_report.ok()) {
        throw prospect::PreferenceError(full_report.summary());
    }
    const prospect::CptReport report = prospect::evaluate(bundle, prefs);
    prospect::write_text_file(
        out_path(opts, "report.csv"),
        prospect::cpt_report_csv(report, full_report.loss_benchmark_integral, lr.meta));
    prospect::write_text_file(out_path(opts, "run.meta"), lr.meta);
    std::cout << prospect::cpt_report_block(report, full_report.loss_benchmark_integral);
    return 0;
}

int cmd_verify(const CommonOptions& opts) {
    LoadedRun lr = load_run(opts, "verify");
    validate_or_throw(lr.model, lr.run.seed);
    const prospect::VerifySettings settings = prospect::verify_settings_from_config(lr.config);

    prospect::Preferences prefs;
    if (lr.config.has("preferences", "benchmark.kind")) {
        prefs = prospect::preferences_from_config(lr.config);
    } else {
        prefs.utilities.u_plus = prospect::preferences::power_utility(1.0, 0.88);
        prefs.utilities.u_minus = prospect::preferences::power_utility(2.25, 0.88);
        prefs.utilities.k_plus = 1.0;
        prefs.utilities.alpha = 0.88;
        prefs.distortions.w_plus = prospect::preferences::identity_distortion();
        prefs.distortions.w_minus = prospect::preferences::identity_distortion();
        prefs.benchmark =
            prospect::preferences::constant_benchmark(lr.model.initial_wealth, 2.0);
    }
    lr.config.require_all_consumed({"run", "control", "optimize", "preferences"});

    const std::vector<prospect::SuiteResult> results = prospect::run_verify_suites(
        lr.model, prefs, settings, lr.run.grid, lr.run.seed);
    prospect::write_text_file(out_path(opts, "verify.csv"),
                              prospect::verify_table_csv(results, lr.meta));
    prospect::write_text_file(out_path(opts, "run.meta"), lr.meta);

    bool failed = false;
    for (const auto& r : results) {
        const char* status = r.status == prospect::SuiteStatus::pass
                                 ? "pass"
                                 : r.status == prospect::SuiteStatus::fail ? "FAIL"
                                                                           : "unsupported";
        std::cout << status << "  " << r.name << "  " << r.detail << "\n";
        failed = failed || r.status == prospect::SuiteStatus::fail;
    }
    if (failed) {
        std::cerr << "verify: at least one invariant suite failed\n";
        return 4;
    }
    return 0;
}

int cmd_optimize(const CommonOptions& opts) {
    LoadedRun lr = load_run(opts, "optimize");
    validate_or_throw(lr.model, lr.run.seed);
    const prospect::Preferences prefs = prospect::preferences_from_config(lr.config);
    const prospect::OptimizeSettings os = prospect::optimize_settings_from_config(lr.config);
    lr.config.require_all_consumed({"run", "control", "verify"});

    const prospect::PreferenceReport fn_report = prospect::validate_preferences(prefs, 256);
    if (!fn_report.ok()) {
        throw prospect::PreferenceError(fn_report.summary());
    }

    prospect::PolicyFamily family = prospect::PolicyFamily::constant();
    if (os.family == prospect::FamilyKind::piecewise_constant_time) {
        family = prospect::PolicyFamily::piecewise_constant_time(os.segments,
                                                                 lr.model.horizon);
    } else if (os.family == prospect::FamilyKind::feedback_grid) {
        family = prospect::PolicyFamily::feedback_from_pilot(
            lr.model, lr.run.grid, os.pilot_paths, lr.run.seed, os.segments, os.y_bins);
    }

    const prospect::OptimizationResult result =
        prospect::optimize(family, lr.model, prefs, lr.run.grid, lr.run.paths, lr.run.seed,
                           os.budget, os.method, opts.threads);

    // Out-of-sample value of the incumbent on a fresh seed.
    const std::uint64_t fresh_seed = prospect::splitmix64(lr.run.seed ^ 0x6f6f735eull);
    const prospect::CptReport oos =
        prospect::evaluate_policy(family, result.best_parameters, lr.model, prefs,
                                  lr.run.grid, lr.run.paths, fresh_seed, opts.threads);

    prospect::write_text_file(out_path(opts, "trace.csv"),
                              prospect::trace_csv(result, lr.meta));
    prospect::write_text_file(out_path(opts, "run.meta"), lr.meta);

    std::cout << "optimize: " << result.evaluations << " evaluations\n"
              << "  best parameters =";
    for (Eigen::Index i = 0; i < result.best_parameters.size(); ++i) {
        std::cout << " " << prospect::format_g17(result.best_parameters[i]);
    }
    std::cout << "\n  in-sample  V = " << prospect::format_g17(result.best_value.v) << " (SE "
              << prospect::format_g17(result.best_value.se_v) << ")\n"
              << "  out-of-sample V = " << prospect::format_g17(oos.v) << " (SE "
              << prospect::format_g17(oos.se_v) << ", seed " << fresh_seed << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"behavioural portfolio engine: simulate, evaluate, verify, optimize"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* simulate = app.add_subcommand("simulate", "simulate joint (Y, X) paths");
    auto* evaluate = app.add_subcommand("evaluate", "evaluate the CPT objective");
    auto* verify = app.add_subcommand("verify", "run the invariant suites");
    auto* optimize = app.add_subcommand("optimize", "search for a CPT-optimal policy");
    for (auto* cmd : {simulate, evaluate, verify, optimize}) add_common(cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (evaluate->parsed()) return cmd_evaluate(opts);
        if (verify->parsed()) return cmd_verify(opts);
        if (optimize->parsed()) return cmd_optimize(opts);
    } catch (const prospect::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const prospect::ModelError& e) {
        std::cerr << "model validation error: " << e.what() << "\n";
        return 2;
    } catch (const prospect::PreferenceError& e) {
        std::cerr << "preference error: " << e.what() << "\n";
        return 3;
    } catch (const prospect::NumericalError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
