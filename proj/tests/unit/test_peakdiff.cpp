#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "vetk/errors.hpp"
#include "vetk/estimands.hpp"
#include "vetk/peakdiff.hpp"

using namespace vetk;
using doctest::Approx;

TEST_SUITE("peakdiff") {
  TEST_CASE("differences vanish on the diagonal") {
    for (double f0 : {0.05, 0.3, 0.9}) {
      CHECK(delta1(f0, f0) == Approx(0.0).epsilon(1e-15));
      CHECK(delta2(f0, f0) == Approx(0.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(delta1(0.2, 0.3), DomainError);
    CHECK_THROWS_AS(delta2(1.0, 0.3), DomainError);
  }

  TEST_CASE("delta1 against the estimands on a tabulated pair") {
    const Scenario s(SurvivalModel::tabulated({{0, 0}, {1, 0.1}}), SurvivalModel::tabulated({{0, 0}, {1, 0.05}}), 1.0);
    CHECK(delta1(0.1, 0.05) == Approx(ve_ch(s, 1.0) - ve_ci(s, 1.0)).epsilon(1e-13));
    CHECK(delta2(0.1, 0.05) == Approx(ve_odds(s, 1.0) - ve_ch(s, 1.0)).epsilon(1e-13));
  }

  TEST_CASE("peak difference maxima") {
    const double f0s[] = {0.01, 0.1, 0.2, 0.3, 0.4, 0.5};
    const double expected[] = {0.13, 1.32, 2.79, 4.45, 6.36, 8.61};
    double prev = 0.0;
    for (int i = 0; i < 6; ++i) {
      const auto a = delta1_max(f0s[i]);
      const auto b = delta2_max(f0s[i]);
      CHECK(std::abs(100 * a.delta_max - expected[i]) <= 0.01);
      CHECK(std::abs(100 * b.delta_max - expected[i]) <= 0.01);
      CHECK(a.delta_max > prev);
      prev = a.delta_max;
      CHECK(a.f1_argmax > 0.0);
      CHECK(a.f1_argmax < f0s[i]);
    }
  }

  TEST_CASE("closed-form argmax matches golden section") {
    for (double f0 : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
      const double x1 = oracle::golden_section_max([f0](double f1) { return delta1(f0, f1); }, 0.0, f0);
      const double x2 = oracle::golden_section_max([f0](double f1) { return delta2(f0, f1); }, 0.0, f0);
      CHECK(std::abs(x1 - delta1_max(f0).f1_argmax) <= 1e-8);
      CHECK(std::abs(x2 - delta2_max(f0).f1_argmax) <= 1e-8);
    }
  }

  TEST_CASE("peak equality") {
    std::vector<double> grid;
    for (int i = 1; i <= 50; ++i) grid.push_back(i / 100.0);
    CHECK(verify_peak_equality(grid) <= 1e-12);
    CHECK(verify_peak_equality(std::vector<double>{0.5}) <= 1e-12);
    CHECK(delta1_max(1e-6).delta_max < 1e-6);
    CHECK(delta2_max(1e-6).delta_max < 1e-6);
  }

  TEST_CASE("differences are nonnegative") {
    for (int i = 1; i < 40; ++i) {
      const double f0 = i / 40.0;
      for (int j = 0; j <= 40; ++j) {
        const double f1 = f0 * j / 40.0;
        CHECK(delta1(f0, f1) >= -1e-15);
        CHECK(delta2(f0, f1) >= -1e-15);
      }
    }
  }

  TEST_CASE("peak difference curves") {
    std::vector<double> ve;
    for (int i = 0; i <= 2000; ++i) ve.push_back(i / 2000.0);
    const double f0s[] = {0.4};
    const auto rows = figure1_data(f0s, ve);
    REQUIRE(rows.size() == ve.size());
    CHECK(std::abs(rows.front().delta1) < 1e-15);
    CHECK(std::abs(rows.back().delta1) < 1e-15);
    CHECK(std::abs(rows.front().delta2) < 1e-15);
    CHECK(std::abs(rows.back().delta2) < 1e-15);
    double m1 = 0, m2 = 0;
    for (const auto& r : rows) {
      m1 = std::max(m1, r.delta1);
      m2 = std::max(m2, r.delta2);
    }
    CHECK(std::abs(100 * m1 - 6.36) <= 0.01);
    CHECK(m1 <= delta1_max(0.4).delta_max + 1e-15);
    CHECK(m2 <= delta2_max(0.4).delta_max + 1e-15);
    // refine around the closed-form argmax
    const auto peak = delta1_max(0.4);
    std::vector<double> fine;
    const double ve_star = 1 - peak.f1_argmax / 0.4;
    for (int i = -50; i <= 50; ++i) fine.push_back(ve_star + i * 1e-7);
    double mf = 0;
    for (const auto& r : figure1_data(f0s, fine)) mf = std::max(mf, r.delta1);
    CHECK(std::abs(mf - peak.delta_max) <= 1e-9);
  }
}
