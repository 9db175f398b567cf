#include <doctest.h>

#include <sstream>

#include "cli/presets.hpp"
#include "vetk/io.hpp"

using namespace vetk;

TEST_SUITE("io") {
  TEST_CASE("scenario presets round-trip through JSON") {
    for (const auto& name : cli::scenario_preset_names()) {
      CAPTURE(name);
      const Scenario s = cli::scenario_preset(name);
      const auto j = io::scenario_to_json(s);
      const Scenario back = io::scenario_from_json(io::parse_json_text(j.dump()));
      CHECK(io::scenario_to_json(back) == j);
      CHECK(back.f1.cdf(back.tau) == s.f1.cdf(s.tau));
    }
  }

  TEST_CASE("trial presets round-trip through JSON") {
    for (const auto& name : cli::trial_preset_names()) {
      const auto j = io::trial_config_to_json(cli::trial_preset(name));
      CHECK(io::trial_config_to_json(io::trial_config_from_json(j)) == j);
    }
  }

  TEST_CASE("models") {
    const auto mix = SurvivalModel::frailty_mixture(SurvivalModel::weibull(2, 3), FrailtySpec::gamma(0.5));
    const auto back = io::model_from_json(io::model_to_json(mix));
    CHECK(back.cdf(1.7) == mix.cdf(1.7));
    CHECK_THROWS_AS(io::model_from_json({{"kind", "lognormal"}}), io::ConfigError);
    CHECK_THROWS_AS(io::model_from_json({{"kind", "exponential"}, {"rate", 1}, {"shape", 2}}), io::ConfigError);
    CHECK_THROWS_AS(io::model_from_json({{"kind", "exponential"}, {"rate", -1}}), io::ConfigError);
  }

  TEST_CASE("trial CSV keeps full precision") {
    AnalysisData d{{{0, 0, 0.0, 0.1 + 0.2, true}, {1, 1, 0.25, 1.0 / 3.0, false}}, 2.0};
    std::ostringstream out;
    io::write_trial_csv(out, d);
    std::istringstream in(out.str());
    const AnalysisData back = io::read_trial_csv(in, 2.0);
    REQUIRE(back.records.size() == 2);
    CHECK(back.records[0].time == 0.1 + 0.2);
    CHECK(back.records[1].time == 1.0 / 3.0);
    CHECK(back.records[1].entry == 0.25);
    CHECK(back.records[1].arm == 1);
    CHECK_FALSE(back.records[1].observed);
  }

  TEST_CASE("syntax errors carry line and column") {
    try {
      io::parse_json_text("{\n\"a\": [1,\n 2,,]}", "x.json");
      FAIL("no throw");
    } catch (const io::ConfigError& e) {
      CHECK(std::string(e.what()).rfind("x.json:3:", 0) == 0);
    }
  }
}
