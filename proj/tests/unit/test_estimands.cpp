#include <doctest.h>

#include <cmath>
#include <random>

#include "cli/presets.hpp"
#include "support/oracles.hpp"
#include "vetk/errors.hpp"
#include "vetk/estimands.hpp"
#include "vetk/rampup.hpp"

using namespace vetk;
using doctest::Approx;

namespace {

Scenario exp_pair(double l0, double l1, double tau) {
  return Scenario(SurvivalModel::exponential(l0), SurvivalModel::exponential(l1), tau);
}

Scenario weibull_ph(double shape, double scale0, double theta, double tau) {
  // S1 = S0^theta  <=>  scale1 = scale0 * theta^(-1/shape)
  return Scenario(SurvivalModel::weibull(shape, scale0),
                  SurvivalModel::weibull(shape, scale0 * std::pow(theta, -1.0 / shape)), tau);
}

}  // namespace

TEST_SUITE("estimands") {
  TEST_CASE("discussion example") {
    const Scenario s = cli::scenario_preset("discussion");
    const auto r = estimand_report(s);
    CHECK(std::abs(100 * r.ve_ci - 87.7) <= 0.05);
    CHECK(std::abs(100 * r.ve_ch - 88.0) <= 0.05);
    CHECK(std::abs(100 * r.ve_odds - 88.4) <= 0.05);
    CHECK(std::abs(100 * r.ir_bounds.ve_lower() - 87.6) <= 0.05);
    CHECK(std::abs(100 * r.ir_bounds.ve_upper() - 88.5) <= 0.05);
    CHECK(r.ir_bounds.ve_lower() <= r.ve_ir);
    CHECK(r.ve_ir <= r.ir_bounds.ve_upper());
    // exponential arms are PH: Cox equals CH
    CHECK(r.ve_cox == Approx(r.ve_ch).epsilon(1e-9));
  }

  TEST_CASE("null pair gives zeros") {
    const Scenario s = cli::scenario_preset("null");
    const auto r = estimand_report(s);
    for (Estimand k : kAllEstimands) CHECK(std::abs(r.ve(k)) < 1e-12);
    CHECK(r.ir_bounds.ve_lower() < 0.0);
    CHECK(r.ir_bounds.ve_upper() > 0.0);
  }

  TEST_CASE("all-or-none mixture keeps VE_CI constant") {
    const auto f0 = SurvivalModel::weibull(1.3, 20.0);
    std::vector<std::pair<double, double>> pts0, pts1;
    for (int i = 0; i <= 100; ++i) {
      const double t = i * 0.5;
      pts0.push_back({t, f0.cdf(t)});
      pts1.push_back({t, 0.6 * f0.cdf(t)});
    }
    const Scenario s(SurvivalModel::tabulated(pts0), SurvivalModel::tabulated(pts1), 50.0);
    for (double t : {5.0, 17.3, 50.0}) CHECK(ve_ci(s, t) == Approx(0.4).epsilon(1e-12));
  }

  TEST_CASE("exponential pairs") {
    for (double theta : {0.1, 0.3, 0.5, 0.9}) {
      const Scenario s = exp_pair(0.02, 0.02 * theta, 30.0);
      for (double t : {3.0, 30.0}) {
        CHECK(ve_ir(s, t) == Approx(1 - theta).epsilon(1e-12));
        CHECK(ve_ch(s, t) == Approx(1 - theta).epsilon(1e-12));
        CHECK(std::abs(ve_cox(s, t) - (1 - theta)) <= 1e-8);
      }
    }
  }

  TEST_CASE("odds arithmetic") {
    const Scenario s(SurvivalModel::tabulated({{0, 0}, {1, 0.5}}), SurvivalModel::tabulated({{0, 0}, {1, 0.25}}), 1.0);
    CHECK(ve_odds(s, 1.0) == Approx(2.0 / 3.0).epsilon(1e-14));
  }

  TEST_CASE("Weibull PH collapse") {
    const Scenario s = weibull_ph(1.7, 60.0, 0.3, 100.0);
    for (double t : {10.0, 50.0, 100.0}) {
      CHECK(ve_ch(s, t) == Approx(0.7).epsilon(1e-12));
      CHECK(std::abs(ve_cox(s, t) - 0.7) <= 1e-8);
      CHECK(std::abs(ve_local_hazard(s, t) - 0.7) <= 1e-8);
    }
    CHECK(weighted_mean_hazard_ratio(s, 100.0, WeightFunction::uniform()) == Approx(0.3).epsilon(1e-10));
  }

  TEST_CASE("panel presets against the fixed-point oracle") {
    for (const char* name : {"figure3:a", "figure3:b", "figure3:c", "figure3:d"}) {
      CAPTURE(name);
      const Scenario s = cli::scenario_preset(name);
      const CoxSolution sol = solve_cox(s, 1.0);
      CHECK(std::abs(sol.theta - oracle::cox_fixed_point(s, 1.0)) <= 1e-6);
      CHECK_FALSE(sol.multiple_roots_suspected);
      CHECK(std::abs(sol.g_at_root) <= 1e-10);
      const auto r = estimand_report(s);
      CHECK(r.ir_bounds.ve_lower() <= r.ve_ir);
      CHECK(r.ve_ir <= r.ir_bounds.ve_upper());
      CHECK(r.ve_ch == Approx(0.5).epsilon(1e-6));
    }
    const auto a = estimand_report(cli::scenario_preset("figure3:a"));
    CHECK(a.ve_cox == Approx(a.ve_ch).epsilon(1e-8));
    CHECK(a.ve_ir == Approx(a.ve_ch).epsilon(1e-10));
    const auto c = estimand_report(cli::scenario_preset("figure3:c"));
    CHECK(std::abs(c.ve_cox - c.ve_ci) < std::abs(c.ve_cox - c.ve_odds));
    CHECK(std::abs(c.ve_ir - c.ve_ci) < std::abs(c.ve_ir - c.ve_odds));
    const auto d = estimand_report(cli::scenario_preset("figure3:d"));
    CHECK(std::abs(d.ve_cox - d.ve_odds) < std::abs(d.ve_cox - d.ve_ci));
  }

  TEST_CASE("conversions") {
    CHECK(theta_ci_to_theta_ch(1.0, 0.3) == Approx(1.0).epsilon(1e-15));
    CHECK(theta_ci_to_theta_ch(0.5, 0.5) == Approx(std::log(0.75) / std::log(0.5)).epsilon(1e-14));
    CHECK(theta_odds_to_theta_ci(1.0, 0.42) == Approx(1.0).epsilon(1e-15));
    CHECK(theta_odds_to_theta_ci(0.2, 0.5) == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(theta_odds_to_theta_ci(0.11601, 0.065) == Approx(0.12308).epsilon(1e-4));
    CHECK_THROWS_AS(theta_ci_to_theta_ch(0.5, 1.2), DomainError);
    CHECK_THROWS_AS(theta_odds_to_theta_ci(-0.1, 0.5), DomainError);

    const Scenario s = cli::scenario_preset("discussion");
    const double f0 = s.f0.cdf(s.tau);
    CHECK(theta_ci_to_theta_ch(1 - ve_ci(s, s.tau), f0) == Approx(1 - ve_ch(s, s.tau)).epsilon(1e-12));
  }

  TEST_CASE("fuzzed conversion consistency") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 0.9);
    for (int i = 0; i < 500; ++i) {
      const double shape = 0.5 + 2 * u(rng);
      const Scenario s(SurvivalModel::weibull(shape, 1.0 + 5 * u(rng)),
                       SurvivalModel::weibull(0.5 + 2 * u(rng), 1.0 + 5 * u(rng)), 0.2 + 3 * u(rng));
      const double f0 = s.f0.cdf(s.tau);
      const double th_ci = 1 - ve_ci(s, s.tau);
      if (th_ci * f0 < 1.0) {
        CHECK(std::abs(theta_ci_to_theta_ch(th_ci, f0) - (1 - ve_ch(s, s.tau))) <= 1e-10);
      }
      CHECK(std::abs(theta_odds_to_theta_ci(1 - ve_odds(s, s.tau), f0) - th_ci) <= 1e-10);
    }
  }

  TEST_CASE("local hazard VE") {
    CHECK(ve_local_hazard(build_scenario(3), 1e-9) == Approx(-2.0).epsilon(1e-6));
    CHECK(ve_local_hazard(build_scenario(2), 14.0) == Approx(0.35).epsilon(1e-12));
    const Scenario zero(SurvivalModel::piecewise_hazard({{0, 1, ConstantHazard{0}}, {1, kInfinity, ConstantHazard{1}}}),
                        SurvivalModel::exponential(1.0), 2.0);
    CHECK_THROWS_AS(ve_local_hazard(zero, 0.5), UndefinedEstimandError);
  }

  TEST_CASE("weighted mean hazard ratio") {
    const Scenario s2 = build_scenario(2);
    CHECK(weighted_mean_hazard_ratio(s2, 28.0, WeightFunction::uniform()) == Approx(0.65).epsilon(1e-10));
    for (const char* name : {"figure3:b", "rampup:2", "rampup:3"}) {
      const Scenario s = cli::scenario_preset(name);
      CHECK(weighted_mean_hazard_ratio(s, s.tau, WeightFunction::control_hazard()) ==
            Approx(1 - ve_ch(s, s.tau)).epsilon(1e-8));
    }
  }

  TEST_CASE("low event rate collapse") {
    // F0(tau) = 1% with a non-PH pair
    const double l0 = -std::log(0.99);
    const Scenario s(SurvivalModel::exponential(l0), SurvivalModel::weibull(2.0, 1.0 / std::sqrt(0.3 * l0)), 1.0);
    const auto r = estimand_report(s);
    // each neighbouring gap is bounded by the largest peak difference at F0 = 1%
    CHECK(r.ve_ch - r.ve_ci <= 0.0013);
    CHECK(r.ve_odds - r.ve_ch <= 0.0013);
    auto spread = [](const EstimandReport& e) {
      double lo = 1, hi = -1;
      for (Estimand k : kAllEstimands) {
        lo = std::min(lo, e.ve(k));
        hi = std::max(hi, e.ve(k));
      }
      return hi - lo;
    };
    CHECK(spread(r) <= 2 * 0.0013);
    // shrinking both hazards shrinks the spread toward zero
    double prev = spread(r);
    for (double eps : {0.1, 0.01, 0.001}) {
      const Scenario small(SurvivalModel::exponential(eps * l0),
                           SurvivalModel::weibull(2.0, 1.0 / std::sqrt(0.3 * eps * l0)), 1.0);
      const double now = spread(estimand_report(small));
      CHECK(now < prev);
      prev = now;
    }
    CHECK(prev <= 1e-5);
  }

  TEST_CASE("time rescaling leaves thetas unchanged") {
    const Scenario s = cli::scenario_preset("figure3:c");
    const double c = 7.0;
    auto stretch = [c](const SurvivalModel& m) {
      std::vector<std::pair<double, double>> pts;
      for (int i = 0; i <= 400; ++i) pts.push_back({c * i / 400.0, m.cdf(i / 400.0)});
      return SurvivalModel::tabulated(pts);
    };
    auto shrink = [](const SurvivalModel& m) {
      std::vector<std::pair<double, double>> pts;
      for (int i = 0; i <= 400; ++i) pts.push_back({i / 400.0, m.cdf(i / 400.0)});
      return SurvivalModel::tabulated(pts);
    };
    const Scenario a(shrink(s.f0), shrink(s.f1), 1.0);
    const Scenario b(stretch(s.f0), stretch(s.f1), c);
    for (Estimand k : kAllEstimands) CHECK(evaluate(k, a, 1.0) == Approx(evaluate(k, b, c)).epsilon(1e-9));
  }

  TEST_CASE("errors") {
    const Scenario s = cli::scenario_preset("discussion");
    CHECK_THROWS_AS(ve_ci(s, 0.0), DomainError);
    CHECK_THROWS_AS(ve_ci(s, 200.0), DomainError);
    CHECK_THROWS_AS(Scenario(SurvivalModel::exponential(1), SurvivalModel::exponential(1), -1.0), DomainError);
    CHECK_THROWS_AS(Scenario(SurvivalModel::exponential(1), SurvivalModel::exponential(1), 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(estimand_from_string("rr"), DomainError);
    CHECK(estimand_from_string("cox") == Estimand::cox);
  }
}
