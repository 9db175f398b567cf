#include <doctest.h>

#include <cmath>
#include <numeric>

#include "vetk/errors.hpp"
#include "vetk/estimands.hpp"
#include "vetk/frailty.hpp"

using namespace vetk;
using doctest::Approx;

TEST_SUITE("frailty") {
  TEST_CASE("Kendall's tau") {
    CHECK(FrailtySpec::gamma(1.0).kendall_tau() == Approx(1.0 / 3.0));
    CHECK(FrailtySpec::gamma(0.0).kendall_tau() == 0.0);
    CHECK(FrailtySpec::positive_stable(0.5).kendall_tau() == Approx(0.5));
    CHECK(spec_from_tau(FrailtyFamily::gamma, 1.0 / 3.0).parameter() == Approx(1.0));
    CHECK(spec_from_tau(FrailtyFamily::positive_stable, 0.2).parameter() == Approx(0.8));
    CHECK_THROWS_AS(spec_from_tau(FrailtyFamily::gamma, 1.0), DomainError);
    CHECK_THROWS_AS(FrailtySpec::positive_stable(1.5), DomainError);
  }

  TEST_CASE("gamma population hazard") {
    const auto base = SurvivalModel::exponential(0.001);
    CHECK(gamma_population_hazard(base, 1.0, 1000.0) == Approx(0.0005).epsilon(1e-13));
    CHECK(gamma_population_hazard(base, 0.0, 1000.0) == 0.001);
    CHECK(gamma_population_hazard(base, 2.0, 0.0) == 0.001);
    const auto pop = gamma_population_model(base, 1.0);
    for (double t : {100.0, 1000.0, 5000.0}) {
      CHECK(pop.hazard(t) == Approx(gamma_population_hazard(base, 1.0, t)).epsilon(1e-12));
      const double h = 1e-6 * t;
      const double fd = (pop.cumulative_hazard(t + h) - pop.cumulative_hazard(t - h)) / (2 * h);
      CHECK(pop.hazard(t) == Approx(fd).epsilon(1e-5));
    }
  }

  TEST_CASE("gamma population hazard ratio") {
    const auto s0 = SurvivalModel::exponential(1.0);
    const auto s1 = SurvivalModel::exponential(0.3);
    auto theta = [](double) { return 0.3; };
    CHECK(gamma_population_hr(theta, s0, s1, 0.0, 0.7) == Approx(0.3));
    double prev = 0.3;
    for (int i = 1; i <= 50; ++i) {
      const double f0 = i / 51.0;
      const double hr = gamma_population_hr_ph(0.3, f0, 1.0);
      CHECK(hr > prev);  // VE declines and stays above the individual ratio
      prev = hr;
      const double t = -std::log1p(-f0);
      CHECK(gamma_population_hr(theta, s0, s1, 1.0, t) == Approx(hr).epsilon(1e-12));
    }
    CHECK(gamma_population_hr_ph(0.3, 0.0, 1.0) == Approx(0.3));
    // theta (1 + nu L) / (1 + theta nu L) approaches 1 only like 1/L
    CHECK(gamma_population_hr_ph(0.3, 0.999, 2.0) == Approx(0.3 * (1 + 2 * -std::log(0.001)) / (1 + 0.6 * -std::log(0.001))));
    CHECK(gamma_population_hr(theta, s0, s1, 2.0, 60.0) > 0.98);  // F0_id = 1 - e^-60
    CHECK(gamma_population_hr_ph(0.3, 0.999, 2.0) < gamma_population_hr_ph(0.3, 0.999999, 2.0));
  }

  TEST_CASE("stable population list") {
    const double expect[] = {70.0, 68.1, 61.8, 54.3, 45.2, 26.0, 11.3};
    const double alphas[] = {1.0, 0.95, 0.80, 0.65, 0.50, 0.25, 0.10};
    for (int i = 0; i < 7; ++i) {
      CHECK(std::abs(100 * (1 - stable_population_hr(0.3, alphas[i])) - expect[i]) <= 0.05);
    }
  }

  TEST_CASE("stable round trip") {
    const auto base0 = SurvivalModel::weibull(1.5, 80.0);
    const auto base1 = SurvivalModel::piecewise_hazard(
        {{0.0, 30.0, LinearHazard{0.0, 0.0}}, {30.0, kInfinity, LocalWeibullHazard{1.2, 60.0}}});
    for (double alpha : {0.25, 0.5, 0.8, 0.95}) {
      const auto p0 = stable_population_model(base0, alpha);
      const auto p1 = stable_population_model(SurvivalModel::weibull(1.5, 80.0 * std::pow(0.4, -1.0 / 1.5)), alpha);
      for (double t : {5.0, 40.0, 120.0}) {
        CHECK(stable_individual_from_population(p0, p1, alpha, t) == Approx(0.4).epsilon(1e-8));
        CHECK(p1.hazard(t) / p0.hazard(t) == Approx(std::pow(0.4, alpha)).epsilon(1e-10));
      }
      const auto q1 = stable_population_model(base1, alpha);
      for (double t : {45.0, 90.0}) {
        CHECK(stable_individual_from_population(p0, q1, alpha, t) ==
              Approx(base1.hazard(t) / base0.hazard(t)).epsilon(1e-8));
      }
    }
    const auto p = stable_population_model(base0, 1.0);
    CHECK(p.cdf(50.0) == base0.cdf(50.0));
    CHECK_THROWS_AS(stable_individual_from_population(base0, base0, 0.5, 1e-9), UndefinedEstimandError);
  }

  TEST_CASE("sampler moments") {
    const auto g = sample_frailty(FrailtySpec::gamma(1.0), 1'000'000, 5);
    const double n = static_cast<double>(g.size());
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / n;
    double var = 0.0;
    for (double x : g) var += (x - mean) * (x - mean);
    var /= n - 1;
    CHECK(std::abs(mean - 1.0) <= 3.0 / std::sqrt(n));
    CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(8.0 / n));  // Var(s^2) ~ (mu4 - 1)/n with mu4 = 9

    const auto tiny = sample_frailty(FrailtySpec::gamma(1e-12), 1000, 5);
    for (double x : tiny) CHECK(x == Approx(1.0).epsilon(1e-4));

    for (double alpha : {0.3, 0.7}) {
      const auto s = sample_frailty(FrailtySpec::positive_stable(alpha), 1'000'000, 9);
      for (double z : {0.5, 1.0, 2.0}) {
        double lt = 0.0;
        for (double x : s) lt += std::exp(-z * x);
        CHECK(std::abs(lt / s.size() - std::exp(-std::pow(z, alpha))) <= 0.005);
      }
    }
    CHECK(sample_frailty(FrailtySpec::positive_stable(0.5), 10, 3) ==
          sample_frailty(FrailtySpec::positive_stable(0.5), 10, 3));
  }

  TEST_CASE("log10 frailty CDF") {
    const std::vector<double> grid{-1.0, 0.0, 1.0};
    const auto g = log10_frailty_cdf(FrailtySpec::gamma(1.0), grid);
    CHECK(g[1] == Approx(1 - std::exp(-1.0)).epsilon(1e-12));
    // sd of log10(U) is about 0.0043 here
    const auto narrow = log10_frailty_cdf(FrailtySpec::gamma(1e-4), std::vector<double>{-0.02, 0.02});
    CHECK(narrow[0] < 1e-4);
    CHECK(narrow[1] > 1 - 1e-4);
    const auto st = log10_frailty_cdf(FrailtySpec::positive_stable(0.1), std::vector<double>{5.0}, 100000);
    CHECK(st[0] < 0.95);  // heavy right tail
  }
}
