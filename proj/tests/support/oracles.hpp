#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls the library routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "vetk/dist.hpp"
#include "vetk/estimands.hpp"
#include "vetk/trial.hpp"

namespace oracle {

/// Fixed point of theta = sum w lambda1 / sum w lambda0 with
/// w = S0 S1 / (theta S1 + S0), midpoint rule on n points over (0, t].
inline double cox_fixed_point(const vetk::Scenario& s, double t, int n = 100000) {
  std::vector<double> s0(n), s1(n), l0(n), l1(n);
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n * t;
    s0[i] = s.f0.survival(u);
    s1[i] = s.f1.survival(u);
    l0[i] = s.f0.hazard(u);
    l1[i] = s.f1.hazard(u);
  }
  double theta = 1.0;
  for (int iter = 0; iter < 10000; ++iter) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = s0[i] * s1[i] / (theta * s1[i] + s0[i]);
      num += w * l1[i];
      den += w * l0[i];
    }
    const double next = num / den;
    if (std::abs(next - theta) < 1e-13) return next;
    theta = next;
  }
  return theta;
}

/// Midpoint Riemann sum of the hazard over [0, t].
inline double riemann_cumulative_hazard(const vetk::SurvivalModel& m, double t, int steps) {
  double sum = 0.0;
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) sum += m.hazard((i + 0.5) * h);
  return sum * h;
}

/// Composite trapezoid of the survival function over [0, tau].
inline double trapezoid_restricted_mean(const vetk::SurvivalModel& m, double tau, int steps) {
  const double h = tau / steps;
  double sum = 0.5 * (1.0 + m.survival(tau));
  for (int i = 1; i < steps; ++i) sum += m.survival(i * h);
  return sum * h;
}

inline double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double tol = 1e-12) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Breslow partial log-likelihood written out directly from its definition.
inline double breslow_log_pl(const vetk::AnalysisData& data, double beta) {
  double ll = 0.0;
  for (const auto& ev : data.records) {
    if (!ev.observed) continue;
    double risk = 0.0;
    for (const auto& r : data.records) {
      if (r.time >= ev.time) risk += std::exp(beta * r.arm);
    }
    ll += beta * ev.arm - std::log(risk);
  }
  return ll;
}

/// argmax of the partial likelihood on a regular beta grid.
inline double grid_search_beta(const vetk::AnalysisData& data, double lo, double hi, double step) {
  double best = lo, best_ll = -INFINITY;
  const int n = static_cast<int>(std::round((hi - lo) / step));
  for (int i = 0; i <= n; ++i) {
    const double b = lo + i * step;
    const double ll = breslow_log_pl(data, b);
    if (ll > best_ll) {
      best_ll = ll;
      best = b;
    }
  }
  return best;
}

/// Kolmogorov-Smirnov distance of a sample from Exp(rate).
inline double ks_exponential(std::vector<double> x, double rate) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = -std::expm1(-rate * x[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

}  // namespace oracle
