#include "vetk/estimands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vetk/errors.hpp"
#include "vetk/numerics.hpp"

namespace vetk {

namespace {

void check_time(const Scenario& s, double t) {
  if (!(t > 0.0) || t > s.tau) {
    std::ostringstream msg;
    msg << "evaluation time " << t << " must lie in (0, tau = " << s.tau << "]";
    throw DomainError(msg.str());
  }
}

struct Attack {
  double f0;
  double f1;
};

Attack attack_rates(const Scenario& s, double t) {
  check_time(s, t);
  const Attack a{s.f0.cdf(t), s.f1.cdf(t)};
  if (!(a.f0 > 0.0)) {
    std::ostringstream msg;
    msg << "control attack rate is 0 at t = " << t;
    throw UndefinedEstimandError(msg.str());
  }
  return a;
}

std::vector<double> merged_knots(const Scenario& s) {
  std::vector<double> k = s.f0.knots();
  const std::vector<double> k1 = s.f1.knots();
  k.insert(k.end(), k1.begin(), k1.end());
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

double hazard_ratio_at(const Scenario& s, double u) {
  const double h0 = s.f0.hazard(u);
  if (!(h0 > 0.0)) {
    std::ostringstream msg;
    msg << "control hazard is 0 at t = " << u << "; the hazard ratio is undefined";
    throw UndefinedEstimandError(msg.str());
  }
  return s.f1.hazard(u) / h0;
}

}  // namespace

Scenario::Scenario(SurvivalModel control, SurvivalModel test, double horizon,
                   std::optional<double> ramp_up, std::string name)
    : f0(std::move(control)), f1(std::move(test)), tau(horizon), t_ru(ramp_up),
      label(std::move(name)) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("scenario tau must be > 0");
  if (t_ru && !(*t_ru > 0.0 && *t_ru < tau)) {
    throw DomainError("scenario t_ru must satisfy 0 < t_ru < tau");
  }
  if (!(f0.cdf(tau) > 0.0)) throw DomainError("control attack rate F0(tau) must be > 0");
}

std::string to_string(Estimand kind) {
  switch (kind) {
    case Estimand::ci: return "ci";
    case Estimand::ir: return "ir";
    case Estimand::cox: return "cox";
    case Estimand::ch: return "ch";
    case Estimand::odds: return "odds";
  }
  return "?";
}

Estimand estimand_from_string(const std::string& name) {
  for (Estimand k : kAllEstimands) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown estimand '" + name + "' (expected ci, ir, cox, ch or odds)");
}

double ve_ci(const Scenario& s, double t) {
  const auto [f0, f1] = attack_rates(s, t);
  return 1.0 - f1 / f0;
}

double ve_ir(const Scenario& s, double t) {
  const auto [f0, f1] = attack_rates(s, t);
  const double mu0 = s.f0.restricted_mean(t);
  const double mu1 = s.f1.restricted_mean(t);
  return 1.0 - (f1 / mu1) / (f0 / mu0);
}

double ve_ch(const Scenario& s, double t) {
  check_time(s, t);
  const double l0 = s.f0.cumulative_hazard(t);
  if (!(l0 > 0.0)) throw UndefinedEstimandError("control cumulative hazard is 0");
  return 1.0 - s.f1.cumulative_hazard(t) / l0;
}

double ve_odds(const Scenario& s, double t) {
  const auto [f0, f1] = attack_rates(s, t);
  return 1.0 - (f1 / (1.0 - f1)) / (f0 / (1.0 - f0));
}

double cox_score(const Scenario& s, double t, double theta, double quadrature_tol) {
  check_time(s, t);
  const auto cuts = merged_knots(s);
  auto integrand = [&](double u) {
    const double s0 = s.f0.survival(u);
    const double s1 = s.f1.survival(u);
    const double l0 = s.f0.hazard(u);
    const double l1 = s.f1.hazard(u);
    return s1 * s0 / (theta * s1 + s0) * (l1 - theta * l0);
  };
  return numerics::integrate(integrand, 0.0, t, cuts, quadrature_tol).value;
}

CoxSolution solve_cox(const Scenario& s, double t, const CoxOptions& options) {
  attack_rates(s, t);
  auto g = [&](double log_theta) {
    return cox_score(s, t, std::exp(log_theta), options.quadrature_tol);
  };
  const double lo = std::log(options.theta_lo);
  const double hi = std::log(options.theta_hi);

  CoxSolution out;
  if (options.scan_for_multiple_roots && options.scan_points > 1) {
    int sign_changes = 0;
    double prev = g(lo);
    for (int i = 1; i < options.scan_points; ++i) {
      const double x = lo + (hi - lo) * i / (options.scan_points - 1);
      const double cur = g(x);
      if ((cur > 0.0) != (prev > 0.0) && cur != 0.0 && prev != 0.0) ++sign_changes;
      prev = cur;
    }
    out.multiple_roots_suspected = sign_changes > 1;
  }

  const auto root = numerics::brent(g, lo, hi, options.log_theta_tol, options.score_tol);
  out.theta = std::exp(root.x);
  out.ve = 1.0 - out.theta;
  out.g_at_root = root.fx;
  out.iterations = root.iterations;
  return out;
}

double ve_cox(const Scenario& s, double t) {
  CoxOptions opts;
  opts.scan_for_multiple_roots = false;
  return solve_cox(s, t, opts).ve;
}

double ve_local_hazard(const Scenario& s, double t) {
  if (!(t >= 0.0)) throw DomainError("ve_local_hazard: t must be >= 0");
  return 1.0 - hazard_ratio_at(s, t);
}

WeightFunction WeightFunction::step(std::vector<double> breaks, std::vector<double> values) {
  if (breaks.empty() || breaks.size() != values.size()) {
    throw DomainError("step weights need matching, nonempty breaks and values");
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!(breaks[i] > prev)) throw DomainError("step weight breaks must increase from 0");
    if (!(values[i] >= 0.0)) throw DomainError("step weights must be >= 0");
    prev = breaks[i];
  }
  return {Step{std::move(breaks), std::move(values)}};
}

double weighted_mean_hazard_ratio(const Scenario& s, double t, const WeightFunction& w) {
  check_time(s, t);
  const auto cuts = merged_knots(s);
  auto ratio_integral = [&](double a, double b) {
    return numerics::integrate([&](double u) { return hazard_ratio_at(s, u); }, a, b, cuts)
        .value;
  };

  if (std::holds_alternative<WeightFunction::ControlHazard>(w.form)) {
    // w theta_h = lambda1, so the ratio reduces to Lambda1 / Lambda0.
    const double l0 = s.f0.cumulative_hazard(t);
    if (!(l0 > 0.0)) throw DomainError("weighted_mean_hazard_ratio: total weight is 0");
    return s.f1.cumulative_hazard(t) / l0;
  }
  if (std::holds_alternative<WeightFunction::Uniform>(w.form)) {
    return ratio_integral(0.0, t) / t;
  }
  const auto& step = std::get<WeightFunction::Step>(w.form);
  double num = 0.0, den = 0.0, a = 0.0;
  for (std::size_t j = 0; j < step.breaks.size() && a < t; ++j) {
    const double b = std::min(step.breaks[j], t);
    if (step.values[j] > 0.0) {
      num += step.values[j] * ratio_integral(a, b);
      den += step.values[j] * (b - a);
    }
    a = b;
  }
  if (!(den > 0.0)) throw DomainError("weighted_mean_hazard_ratio: total weight is 0");
  return num / den;
}

double theta_ci_to_theta_ch(double theta_ci, double f0_tau) {
  if (!(f0_tau > 0.0 && f0_tau < 1.0)) throw DomainError("F0(tau) must lie in (0, 1)");
  const double x = theta_ci * f0_tau;
  if (!(x > 0.0 && x < 1.0)) throw DomainError("theta_CI * F0(tau) must lie in (0, 1)");
  return std::log1p(-x) / std::log1p(-f0_tau);
}

double theta_odds_to_theta_ci(double theta_odds, double f0_tau) {
  if (!(f0_tau > 0.0 && f0_tau < 1.0)) throw DomainError("F0(tau) must lie in (0, 1)");
  if (!(theta_odds > 0.0) || !std::isfinite(theta_odds)) {
    throw DomainError("odds ratio must be finite and > 0");
  }
  return theta_odds / (1.0 - f0_tau + theta_odds * f0_tau);
}

IrBounds theta_ir_bounds(const Scenario& s, double t) {
  const auto [f0, f1] = attack_rates(s, t);
  const double theta_ci = f1 / f0;
  const double theta_odds = (f1 / (1.0 - f1)) / (f0 / (1.0 - f0));
  return IrBounds{theta_ci * (1.0 - f0), theta_odds / (1.0 - f0)};
}

double EstimandReport::ve(Estimand kind) const {
  switch (kind) {
    case Estimand::ci: return ve_ci;
    case Estimand::ir: return ve_ir;
    case Estimand::cox: return ve_cox;
    case Estimand::ch: return ve_ch;
    case Estimand::odds: return ve_odds;
  }
  return 0.0;
}

EstimandReport estimand_report(const Scenario& s) { return estimand_report(s, s.tau); }

EstimandReport estimand_report(const Scenario& s, double t) {
  EstimandReport r{};
  r.evaluated_at = t;
  r.ve_ci = vetk::ve_ci(s, t);
  r.ve_ir = vetk::ve_ir(s, t);
  r.ve_ch = vetk::ve_ch(s, t);
  r.ve_odds = vetk::ve_odds(s, t);
  r.cox = solve_cox(s, t);
  r.ve_cox = r.cox.ve;
  r.ir_bounds = theta_ir_bounds(s, t);
  return r;
}

double evaluate(Estimand kind, const Scenario& s, double t) {
  switch (kind) {
    case Estimand::ci: return ve_ci(s, t);
    case Estimand::ir: return ve_ir(s, t);
    case Estimand::cox: return ve_cox(s, t);
    case Estimand::ch: return ve_ch(s, t);
    case Estimand::odds: return ve_odds(s, t);
  }
  throw DomainError("unknown estimand");
}

}  // namespace vetk
