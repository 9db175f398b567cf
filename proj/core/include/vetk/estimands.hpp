#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vetk/dist.hpp"

namespace vetk {

/// A control/test distribution pair with study horizon tau and an optional
/// ramp-up end t_ru.
struct Scenario {
  SurvivalModel f0;
  SurvivalModel f1;
  double tau;
  std::optional<double> t_ru;
  std::string label;

  /// Throws DomainError unless tau > 0, 0 < t_ru < tau and F0(tau) > 0.
  Scenario(SurvivalModel control, SurvivalModel test, double horizon,
           std::optional<double> ramp_up = std::nullopt, std::string name = {});
};

enum class Estimand { ci, ir, cox, ch, odds };

std::string to_string(Estimand kind);
Estimand estimand_from_string(const std::string& name);
inline constexpr Estimand kAllEstimands[] = {Estimand::ci, Estimand::ir, Estimand::cox,
                                             Estimand::ch, Estimand::odds};

// Cumulative estimands at 0 < t <= s.tau, on the VE = 1 - theta scale.
double ve_ci(const Scenario& s, double t);
double ve_ir(const Scenario& s, double t);
double ve_ch(const Scenario& s, double t);
double ve_odds(const Scenario& s, double t);

struct CoxOptions {
  double theta_lo = 1e-8;
  double theta_hi = 1e8;
  double log_theta_tol = 1e-10;
  double score_tol = 1e-10;
  double quadrature_tol = 1e-11;
  /// Scan g on a log grid to flag more than one sign change.
  bool scan_for_multiple_roots = true;
  int scan_points = 1024;
};

struct CoxSolution {
  double theta = 1.0;
  double ve = 0.0;
  double g_at_root = 0.0;
  int iterations = 0;
  bool multiple_roots_suspected = false;
};

/// g(theta) = int_0^t S1 S0 / (theta S1 + S0) (lambda1 - theta lambda0) du.
double cox_score(const Scenario& s, double t, double theta,
                 double quadrature_tol = 1e-11);

/// Limit of the Cox estimator with no censoring before t: root of cox_score,
/// found by Brent's method in log theta.
CoxSolution solve_cox(const Scenario& s, double t, const CoxOptions& options = {});
double ve_cox(const Scenario& s, double t);

/// 1 - lambda1(t)/lambda0(t). Throws UndefinedEstimandError if lambda0(t) = 0.
double ve_local_hazard(const Scenario& s, double t);

struct WeightFunction {
  struct ControlHazard {};
  struct Uniform {};
  /// w = values[j] on (breaks[j-1], breaks[j]] with breaks[-1] = 0.
  struct Step {
    std::vector<double> breaks;
    std::vector<double> values;
  };
  std::variant<ControlHazard, Uniform, Step> form;

  static WeightFunction control_hazard() { return {ControlHazard{}}; }
  static WeightFunction uniform() { return {Uniform{}}; }
  static WeightFunction step(std::vector<double> breaks, std::vector<double> values);
};

/// int_0^t w theta_h / int_0^t w.
double weighted_mean_hazard_ratio(const Scenario& s, double t, const WeightFunction& w);

/// ln(1 - theta_ci F0) / ln(1 - F0).
double theta_ci_to_theta_ch(double theta_ci, double f0_tau);
/// theta_odds / (1 - F0 + theta_odds F0).
double theta_odds_to_theta_ci(double theta_odds, double f0_tau);

struct IrBounds {
  double theta_lower;
  double theta_upper;
  double ve_lower() const { return 1.0 - theta_upper; }
  double ve_upper() const { return 1.0 - theta_lower; }
};

/// theta_CI (1 - F0) <= theta_IR <= theta_odds / (1 - F0).
IrBounds theta_ir_bounds(const Scenario& s, double t);

struct EstimandReport {
  double evaluated_at;
  double ve_ci, ve_ir, ve_cox, ve_ch, ve_odds;
  IrBounds ir_bounds;
  CoxSolution cox;

  double theta(Estimand kind) const { return 1.0 - ve(kind); }
  double ve(Estimand kind) const;
};

EstimandReport estimand_report(const Scenario& s);
EstimandReport estimand_report(const Scenario& s, double t);

double evaluate(Estimand kind, const Scenario& s, double t);

}  // namespace vetk
