#include <doctest.h>

#include <cmath>

#include "vetk/errors.hpp"
#include "vetk/rampup.hpp"

using namespace vetk;
using doctest::Approx;

TEST_SUITE("rampup") {
  TEST_CASE("memorylessness") {
    const auto e = SurvivalModel::exponential(0.0123);
    const auto c = conditional_distribution(e, 28.0);
    REQUIRE(c.as<SurvivalModel::Exponential>() != nullptr);
    for (double t : {0.5, 10.0, 100.0}) CHECK(std::abs(c.survival(t) - e.survival(t)) <= 1e-12);
  }

  TEST_CASE("zero ramp-up is the identity") {
    const auto w = SurvivalModel::weibull(1.4, 30.0);
    const auto c = conditional_distribution(w, 0.0);
    for (double t : {1.0, 20.0}) CHECK(c.cdf(t) == w.cdf(t));
  }

  TEST_CASE("rampup:1 test arm becomes exponential after 28 days") {
    const Scenario s = build_scenario(1);
    const auto c = conditional_distribution(s.f1, 28.0);
    for (double t : {1.0, 50.0, 122.0}) CHECK(c.hazard(t) == Approx(0.3 * 0.0005).epsilon(1e-14));
    for (double t : {0.0, 7.0, 28.0}) CHECK(s.f1.cdf(t) == Approx(s.f0.cdf(t)).epsilon(1e-14));
  }

  TEST_CASE("conditioning identity") {
    for (int id : {1, 2, 3}) {
      const Scenario s = build_scenario(id);
      for (const auto* m : {&s.f0, &s.f1}) {
        for (double cut : {5.0, 14.0, 28.0, 40.0}) {
          const auto c = conditional_distribution(*m, cut);
          for (double t : {0.0, 3.0, 28.0, 100.0}) {
            CHECK(std::abs(c.survival(t) - m->survival(cut + t) / m->survival(cut)) <= 1e-12);
            if (t > 0) CHECK(c.hazard(t) == Approx(m->hazard(cut + t)).epsilon(1e-12));
          }
        }
      }
    }
  }

  TEST_CASE("closed form on [0, t_ru]") {
    const auto p = rampup_preset(2);
    const Scenario s = build_scenario(2);
    for (double t : {1.0, 14.0, 28.0}) {
      const double expect = 1 - std::exp(-p.lambda0 * (p.psi1 * t + t * t * (p.psi2 - p.psi1) / (2 * p.t_ru)));
      CHECK(s.f1.cdf(t) == Approx(expect).epsilon(1e-13));
    }
    CHECK(ve_local_hazard(s, 28.0) == Approx(0.7).epsilon(1e-12));
    CHECK(ve_local_hazard(s, 90.0) == Approx(0.7).epsilon(1e-12));
  }

  TEST_CASE("ramp-up VE_CH") {
    for (int id : {1, 2}) {
      const Scenario s = build_scenario(id);
      for (double ts : {0.5, 60.0, 122.0}) CHECK(std::abs(rampup_ve(Estimand::ch, s, ts) - 0.7) <= 1e-9);
    }
    const Scenario s3 = build_scenario(3);
    for (double ts : {0.5, 60.0, 122.0}) CHECK(std::abs(rampup_ve(Estimand::ch, s3, ts) - 0.3) <= 1e-9);
    CHECK(s3.f1.cdf(150.0) > 0.0);
    CHECK_THROWS_AS(rampup_ve(Estimand::ch, Scenario(s3.f0, s3.f1, 150.0), 10.0), DomainError);
  }

  TEST_CASE("VE_CI star identity under the ideal ramp-up model") {
    // only rampup:1 has F1 = F0 on [0, t_ru]
    const Scenario s = build_scenario(1);
    const double f28 = s.f0.cdf(28.0);
    for (int i = 1; i <= 200; ++i) {
      const double t = 28.0 + 122.0 * i / 200.0;
      const double direct = rampup_ve(Estimand::ci, s, t - 28.0);
      const double implied = ve_ci_star_from_ve_ci(ve_ci(s, t), s.f0.cdf(t), f28);
      CHECK(std::abs(direct - implied) <= 1e-9);
    }
    CHECK(ve_ci_star_from_ve_ci(0.4, 0.1, 0.0) == Approx(0.4));
    CHECK(ve_ci_star_from_ve_ci(0.0, 0.1, 0.02) == 0.0);
    CHECK_THROWS_AS(ve_ci_star_from_ve_ci(0.4, 0.1, 0.2), DomainError);
  }

  TEST_CASE("curves") {
    const Scenario s = build_scenario(1);
    const std::vector<double> grid{10.0, 28.0, 60.0, 150.0};
    const Estimand kinds[] = {Estimand::ch, Estimand::ci};
    const auto rows = ve_curves(s, grid, kinds, true);
    REQUIRE(rows.size() == 4);
    CHECK_FALSE(rows[0].rampup[0].has_value());
    CHECK_FALSE(rows[1].rampup[0].has_value());
    CHECK(*rows[2].rampup[0] == Approx(0.7).epsilon(1e-9));
    CHECK(*rows[3].itt[0] == Approx(ve_ch(s, 150.0)));
    CHECK(ve_curves(s, {}, kinds, true).empty());
  }

  TEST_CASE("invalid preset") { CHECK_THROWS_AS(build_scenario(4), DomainError); }
}
