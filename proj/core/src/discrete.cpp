#include "vetk/discrete.hpp"

#include <cmath>
#include <sstream>

#include "vetk/errors.hpp"

namespace vetk {

AssessmentGrid AssessmentGrid::make(std::vector<double> times) {
  if (times.empty()) throw DomainError("assessment grid must be nonempty");
  double prev = 0.0;
  for (double t : times) {
    if (!(t > prev) || !std::isfinite(t)) {
      throw DomainError("assessment times must be finite and strictly increasing from 0");
    }
    prev = t;
  }
  return AssessmentGrid(std::move(times));
}

AssessmentGrid AssessmentGrid::equally_spaced(double tau, std::size_t k) {
  if (k == 0) throw DomainError("assessment grid needs k >= 1");
  if (!(tau > 0.0)) throw DomainError("assessment grid needs tau > 0");
  std::vector<double> times(k);
  for (std::size_t j = 0; j < k; ++j) times[j] = tau * static_cast<double>(j + 1) / k;
  times.back() = tau;
  return AssessmentGrid(std::move(times));
}

std::vector<double> discrete_hazard(const SurvivalModel& f, const AssessmentGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  double prev = 0.0;
  for (double t : grid.times()) {
    const double cum = f.cumulative_hazard(t);
    out.push_back(-std::expm1(-(cum - prev)));
    prev = cum;
  }
  return out;
}

double theta_wdh(const Scenario& s, const AssessmentGrid& grid, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != grid.size()) {
    throw DomainError("theta_wdh: need one weight per assessment interval");
  }
  const auto h0 = discrete_hazard(s.f0, grid);
  const auto h1 = discrete_hazard(s.f1, grid);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double w = weights.empty() ? 1.0 : weights[j];
    if (!(w >= 0.0)) throw DomainError("theta_wdh: weights must be >= 0");
    if (w == 0.0) continue;
    if (!(h0[j] > 0.0)) {
      std::ostringstream msg;
      msg << "control discrete hazard is 0 on interval " << j + 1;
      throw UndefinedEstimandError(msg.str());
    }
    num += w * h1[j] / h0[j];
    den += w;
  }
  if (!(den > 0.0)) throw DomainError("theta_wdh: weights are all zero");
  return num / den;
}

std::vector<DiscreteTableRow> table_ve_dh(double ve_ch, std::span<const double> f0_tau,
                                          std::span<const std::size_t> ks) {
  if (!(ve_ch >= 0.0 && ve_ch < 1.0)) throw DomainError("VE_CH must lie in [0, 1)");
  std::vector<DiscreteTableRow> rows;
  for (double f0 : f0_tau) {
    if (!(f0 > 0.0 && f0 < 1.0)) throw DomainError("F0(tau) must lie in (0, 1)");
    const double cum0 = -std::log1p(-f0);
    const double cum1 = (1.0 - ve_ch) * cum0;
    for (std::size_t k : ks) {
      if (k == 0) throw DomainError("number of assessments must be >= 1");
      const double kk = static_cast<double>(k);
      const double h0 = -std::expm1(-cum0 / kk);
      const double h1 = -std::expm1(-cum1 / kk);
      rows.push_back({k, f0, ve_ch, 1.0 - h1 / h0});
    }
  }
  return rows;
}

ContinuumReport continuum_limit_check(const Scenario& s, const WeightFunction& w,
                                      std::span<const std::size_t> ks) {
  ContinuumReport report{weighted_mean_hazard_ratio(s, s.tau, w), {}, true};

  auto interval_weight = [&](double a, double b) {
    return std::visit(
        [&](const auto& form) -> double {
          using T = std::decay_t<decltype(form)>;
          if constexpr (std::is_same_v<T, WeightFunction::ControlHazard>) {
            return (s.f0.cumulative_hazard(b) - s.f0.cumulative_hazard(a)) / (b - a);
          } else if constexpr (std::is_same_v<T, WeightFunction::Uniform>) {
            return 1.0;
          } else {
            double area = 0.0, lo = 0.0;
            for (std::size_t j = 0; j < form.breaks.size(); ++j) {
              const double hi = form.breaks[j];
              area += form.values[j] * std::max(0.0, std::min(hi, b) - std::max(lo, a));
              lo = hi;
            }
            return area / (b - a);
          }
        },
        w.form);
  };

  double prev_err = kInfinity;
  for (std::size_t k : ks) {
    const auto grid = AssessmentGrid::equally_spaced(s.tau, k);
    std::vector<double> weights;
    double a = 0.0;
    for (double b : grid.times()) {
      weights.push_back(interval_weight(a, b));
      a = b;
    }
    const double value = theta_wdh(s, grid, weights);
    const double err = std::abs(value - report.theta_wh);
    if (err > prev_err + 1e-12) report.error_nonincreasing = false;
    prev_err = err;
    report.rows.push_back({k, value, err});
  }
  return report;
}

}  // namespace vetk
