#include <doctest.h>

#include "prospect/config.hpp"
#include "prospect/errors.hpp"

using namespace prospect;

namespace {

const char* kGoodConfig = R"(# reference run
[model]
variant = base
horizon = 1.0
dimension = 1
initial_wealth = 1.0
initial_factor = 0.0
nu.kind = constant
nu.value = 0.0
kappa.kind = constant
kappa.value = 0.3
theta.kind = constant
theta.value = 0.05
lambda.kind = constant
lambda.value = 0.2

[preferences]
u_plus.kind = power
u_plus.coef = 1.0
u_plus.exponent = 0.88
u_minus.kind = power
u_minus.coef = 2.25
u_minus.exponent = 0.88
w_plus.kind = identity
w_minus.kind = identity
benchmark.kind = constant
benchmark.value = 1.0
benchmark.theta_star = 2.0

[grid]
steps = 32
paths = 100
seed = 7
scheme = exact_exponential

[control]
kind = policy
policy.kind = constant
policy.value = 0.5
)";

}  // namespace

TEST_CASE("config: parse, typed getters and serialization round-trip") {
    const ConfigFile cfg = ConfigFile::parse_text(kGoodConfig, "test.cfg");
    CHECK(cfg.get_double("model", "horizon") == 1.0);
    CHECK(cfg.get_int("grid", "steps") == 32);
    CHECK(cfg.get_string("control", "policy.kind") == "constant");
    CHECK(cfg.get_doubles("model", "initial_factor").size() == 1);
    CHECK(cfg.get_double_or("grid", "absent", 9.5) == 9.5);

    const ConfigFile again = ConfigFile::parse_text(cfg.serialize(), "roundtrip");
    CHECK(again.get_double("model", "theta.value") == 0.05);
    CHECK(again.get_int("grid", "seed") == 7);
}

TEST_CASE("config: errors name the file, line and key") {
    CHECK_THROWS_WITH_AS((void)ConfigFile::parse_text("[model]\nbad line\n", "f.cfg"),
                         doctest::Contains("f.cfg:2"), ConfigError);
    CHECK_THROWS_WITH_AS((void)ConfigFile::parse_text("key = 1\n", "f.cfg"),
                         doctest::Contains("before any [section]"), ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)ConfigFile::parse_text("[a]\nk = 1\nk = 2\n", "f.cfg"),
        doctest::Contains("duplicate key 'a.k'"), ConfigError);

    const ConfigFile cfg = ConfigFile::parse_text("[grid]\nsteps = abc\n", "f.cfg");
    CHECK_THROWS_WITH_AS((void)cfg.get_int("grid", "steps"),
                         doctest::Contains("'grid.steps' is not an integer"), ConfigError);
    CHECK_THROWS_WITH_AS((void)cfg.get_double("grid", "missing"),
                         doctest::Contains("missing required key 'grid.missing'"),
                         ConfigError);
}

TEST_CASE("config: unconsumed keys are reported") {
    const ConfigFile cfg = ConfigFile::parse_text("[grid]\nsteps = 8\ntypo_key = 1\n", "f.cfg");
    (void)cfg.get_int("grid", "steps");
    CHECK_THROWS_WITH_AS(cfg.require_all_consumed(), doctest::Contains("grid.typo_key"),
                         ConfigError);
    (void)cfg.get_int("grid", "typo_key");
    CHECK_NOTHROW(cfg.require_all_consumed());
}

TEST_CASE("config: model, preferences, settings and control builders") {
    const ConfigFile cfg = ConfigFile::parse_text(kGoodConfig, "test.cfg");
    const MarketModel model = model_from_config(cfg);
    CHECK(model.horizon == 1.0);
    CHECK(model.variant == Variant::base);
    CHECK(model.coefficient_bound() == 0.3);

    const Preferences prefs = preferences_from_config(cfg);
    CHECK(prefs.well_posed());
    CHECK(prefs.benchmark.constant);
    CHECK(prefs.benchmark.constant_value == 1.0);
    CHECK(prefs.utilities.alpha == 0.88);

    const RunSettings rs = run_settings_from_config(cfg, model);
    CHECK(rs.grid.steps == 32);
    CHECK(rs.paths == 100);
    CHECK(rs.seed == 7);
    CHECK(rs.scheme == Scheme::exact_exponential);

    const Control control = control_from_config(cfg, model);
    CHECK(std::holds_alternative<Policy>(control));
}

TEST_CASE("config: seed override is reflected in serialization") {
    ConfigFile cfg = ConfigFile::parse_text(kGoodConfig, "test.cfg");
    cfg.set("grid", "seed", "12345");
    const ConfigFile again = ConfigFile::parse_text(cfg.serialize(), "resolved");
    CHECK(again.get_int("grid", "seed") == 12345);
}

TEST_CASE("config: unknown enumeration values are rejected with the key name") {
    const char* bad = "[model]\nvariant = sideways\nhorizon = 1\n";
    const ConfigFile cfg = ConfigFile::parse_text(bad, "f.cfg");
    CHECK_THROWS_WITH_AS((void)model_from_config(cfg), doctest::Contains("model.variant"),
                         ConfigError);
}

TEST_CASE("config: relaxed control block builds both evaluators") {
    std::string text(kGoodConfig);
    text.replace(text.find("kind = policy"), 13, "kind = relaxed");
    text += "l.kind = constant\nl.value = 0.2\nm.kind = constant\nm.value = 0.5\n";
    const ConfigFile cfg = ConfigFile::parse_text(text, "relaxed.cfg");
    const MarketModel model = model_from_config(cfg);
    const Control control = control_from_config(cfg, model);
    REQUIRE(std::holds_alternative<RelaxedControl>(control));
    const SimulationGrid grid{8, 1.0};
    const PathBundle b = simulate(model, control, grid, 4, 1, Scheme::exact_exponential);
    CHECK(b.control_kind == ControlKind::relaxed);
}
