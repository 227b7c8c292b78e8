#include <doctest.h>

#include <string>
#include <vector>

#include "platsim/config.hpp"

using namespace platsim;

TEST_CASE("empty object yields the default design") {
    auto grid = parse_config_text("{}");
    CHECK(grid.scenarios.size() == 1);
    const auto& c = grid.scenarios[0];
    CHECK(c.scenario_id == "s000");
    CHECK(c.mode == TrialMode::platform);
    CHECK(c.randomization == RandomizationType::modified_block);
    CHECK(c.allocation.kind == AllocationKind::sqrt_k_capped);
    CHECK(c.allocation.cap == doctest::Approx(0.35));
    CHECK(c.analysis_covariates == CovariateSet::baseline_only);
    CHECK(!c.interim_fraction.has_value());
    CHECK(!c.futility_boundary.has_value());
    CHECK(c.target_n_per_arm == 80);
    CHECK(c.initial_arms == 6);
    CHECK(c.max_concurrent_arms == 6);
    CHECK(c.entry_probability_per_month == 1.0);
    CHECK(c.entry_horizon_months == 60);
    CHECK(c.entry_horizon_weeks() == 240);
    CHECK(c.effect_distribution.theta == std::array<double, 4>{0.25, 0.25, 0.25, 0.25});
    CHECK(!c.time_trend.has_value());
    CHECK(c.alpha == 0.05);
    CHECK(c.replicates == 10000);
}

TEST_CASE("strict parsing rejects unknown keys with a path") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"target_n": 80})"),
                         doctest::Contains("target_n"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"allocation": {"kind": "sqrt_k", "cup": 1}})"),
                         doctest::Contains("cup"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[1, 2]"), ConfigError);
}

TEST_CASE("semantic validation failures") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"futility_boundary": 0.5})"),
                         doctest::Contains("interim_fraction"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"interim_fraction": 1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"alpha": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"initial_arms": 4, "max_concurrent_arms": 2})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"recruitment_law": {"7": 0.9}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"allocation": {"kind": "balanced", "cap": 0.3}})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"effect_distribution": {"0": 0.5, "0.2": 0.5, "0.35": 0.5}})"),
        ConfigError);
}

TEST_CASE("allocation accepts a bare kind or an object with a cap") {
    auto a = parse_config_text(R"({"allocation": "balanced"})");
    CHECK(a.scenarios[0].allocation.kind == AllocationKind::balanced);
    auto b = parse_config_text(R"({"allocation": {"kind": "sqrt_k_capped", "cap": 0.2}})");
    CHECK(b.scenarios[0].allocation.cap == doctest::Approx(0.2));
}

TEST_CASE("named and explicit effect distributions") {
    auto p = parse_config_text(R"({"effect_distribution": "pessimistic"})");
    CHECK(p.scenarios[0].effect_distribution.theta == std::array<double, 4>{0.5, 0.3, 0.1, 0.1});
    auto e = parse_config_text(
        R"({"effect_distribution": {"0": 0.4, "0.2": 0.3, "0.35": 0.2, "0.5": 0.1}})");
    CHECK(e.scenarios[0].effect_distribution.theta == std::array<double, 4>{0.4, 0.3, 0.2, 0.1});
}

TEST_CASE("two_arm_series mode normalizes to the 1:1 comparator profile") {
    auto grid = parse_config_text(R"({"mode": "two_arm_series", "target_n_per_arm": 100})");
    const auto& c = grid.scenarios[0];
    CHECK(c.mode == TrialMode::two_arm_series);
    CHECK(c.allocation.kind == AllocationKind::balanced);
    CHECK(c.randomization == RandomizationType::modified_block);
    CHECK(c.initial_arms == 1);
    CHECK(c.max_concurrent_arms == 1);
    CHECK(c.target_n_per_arm == 100);
}

TEST_CASE("sweeps expand as a cross product, first key outermost") {
    const std::string text = R"({
        "replicates": 100,
        "sweeps": {
            "target_n_per_arm": [60, 80],
            "futility_boundary": [null, 0.5, 0.2],
            "interim_fraction": [0.5]
        }
    })";
    auto grid = parse_config_text(text);
    REQUIRE(grid.scenarios.size() == 6);
    CHECK(grid.scenarios[0].scenario_id ==
          "s000-target_n_per_arm=60-futility_boundary=none-interim_fraction=0.5");
    CHECK(grid.scenarios[0].target_n_per_arm == 60);
    CHECK(!grid.scenarios[0].futility_boundary.has_value());
    CHECK(grid.scenarios[1].futility_boundary == 0.5);
    CHECK(grid.scenarios[2].futility_boundary == 0.2);
    CHECK(grid.scenarios[3].target_n_per_arm == 80);
    CHECK(grid.scenarios[5].target_n_per_arm == 80);
    CHECK(grid.scenarios[5].futility_boundary == 0.2);
    for (const auto& s : grid.scenarios) CHECK(s.interim_fraction == 0.5);
}

TEST_CASE("sweep values are validated like base values") {
    CHECK_THROWS_AS(parse_config_text(R"({"sweeps": {"alpha": [0.05, 7]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"sweeps": {"scenario_id": ["a", "b"]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"sweeps": {"unknown_key": [1]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"sweeps": {"alpha": []}})"), ConfigError);
}

TEST_CASE("serialize then parse round-trips") {
    const std::string text = R"({
        "randomization": "simple",
        "allocation": {"kind": "sqrt_k_capped", "cap": 0.25},
        "interim_fraction": 0.5,
        "futility_boundary": 0.3,
        "time_trend": {"step_fraction": 0.1, "interpretation": "sd"},
        "effect_distribution": "pessimistic",
        "recruitment_law": {"5": 0.2, "7": 0.8},
        "replicates": 123,
        "master_seed": 777
    })";
    auto grid = parse_config_text(text);
    auto serialized = serialize_scenario(grid.scenarios[0]);
    auto reparsed = parse_config_text(serialized);
    CHECK(serialize_scenario(reparsed.scenarios[0]) == serialized);
}

TEST_CASE("cli overrides replace seed and replicate count") {
    auto grid = parse_config_text(R"({"replicates": 50, "master_seed": 1})", 999, 7);
    CHECK(grid.scenarios[0].master_seed == 999);
    CHECK(grid.scenarios[0].replicates == 7);
}

TEST_CASE("digest is stable and sensitive") {
    auto a = parse_config_text(R"({"replicates": 100})");
    auto b = parse_config_text(R"({"replicates": 100})");
    auto c = parse_config_text(R"({"replicates": 101})");
    auto d = parse_config_text(R"({"replicates": 100, "sweeps": {"alpha": [0.05]}})");
    CHECK(a.digest_hex == b.digest_hex);
    CHECK(a.digest_hex != c.digest_hex);
    CHECK(a.digest_hex != d.digest_hex);
    CHECK(a.digest_hex.size() == 16);
}
