#pragma once

#include <span>
#include <vector>

#include "vetk/dist.hpp"
#include "vetk/estimands.hpp"

namespace vetk {

/// Assessment times t_1 < ... < t_k = tau, with t_0 = 0 implied.
class AssessmentGrid {
 public:
  static AssessmentGrid make(std::vector<double> times);
  static AssessmentGrid equally_spaced(double tau, std::size_t k);

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  double tau() const { return times_.back(); }

 private:
  explicit AssessmentGrid(std::vector<double> times) : times_(std::move(times)) {}
  std::vector<double> times_;
};

/// h_j = 1 - exp(-(Lambda(t_j) - Lambda(t_{j-1}))).
std::vector<double> discrete_hazard(const SurvivalModel& f, const AssessmentGrid& grid);

/// sum w_j h1_j / h0_j / sum w_j; empty weights mean equal weights.
double theta_wdh(const Scenario& s, const AssessmentGrid& grid, std::span<const double> weights = {});

struct DiscreteTableRow {
  std::size_t k;
  double f0_tau;
  double ve_ch;
  double ve_dh;
};

/// Two exponential arms with F0(tau) = f0 and VE_CH given, assessed k times.
std::vector<DiscreteTableRow> table_ve_dh(double ve_ch, std::span<const double> f0_tau,
                                          std::span<const std::size_t> ks);

struct ContinuumRow {
  std::size_t k;
  double theta_wdh;
  double abs_error;  // |theta_wdh - theta_wh|
};

struct ContinuumReport {
  double theta_wh;
  std::vector<ContinuumRow> rows;
  bool error_nonincreasing;  // within 1e-12 slack
};

/// Compares theta_wdh on k equal intervals (w_j the interval average of w)
/// with the continuous weighted mean hazard ratio at s.tau.
ContinuumReport continuum_limit_check(const Scenario& s, const WeightFunction& w,
                                      std::span<const std::size_t> ks);

}  // namespace vetk
