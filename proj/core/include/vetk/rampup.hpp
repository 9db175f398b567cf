#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vetk/dist.hpp"
#include "vetk/estimands.hpp"

namespace vetk {

/// Law of T - t_ru given T > t_ru. Exponential and piecewise models (other
/// than local-Weibull segments cut mid-way) come back in closed form; anything
/// else is wrapped.
SurvivalModel conditional_distribution(const SurvivalModel& f, double t_ru);

/// Estimand `kind` on the conditional pair (F0*, F1*) with horizon tau - t_ru,
/// evaluated at t_star on the post-ramp-up clock.
double rampup_ve(Estimand kind, const Scenario& s, double t_star);

/// VE*_CI(t - t_ru) implied by VE_CI(t) when both arms coincide on [0, t_ru].
double ve_ci_star_from_ve_ci(double ve_ci_t, double f0_t, double f0_tru);

enum class RampShape { step, linear };

/// Control hazard lambda0; test hazard lambda0 * psi(t) with psi going from
/// psi1 at t = 0 to psi2 at t_ru (a jump for `step`, a straight line for
/// `linear`), and psi2 afterwards.
struct RampUpScenarioParams {
  double t_ru = 28.0;
  double tau = 150.0;
  double lambda0 = 0.0005;
  double psi1 = 1.0;
  double psi2 = 0.3;
  RampShape shape = RampShape::linear;
};

RampUpScenarioParams rampup_preset(int id);
Scenario build_scenario(int id);
Scenario build_scenario(const RampUpScenarioParams& params);

struct CurveRow {
  double t;
  std::vector<std::optional<double>> itt;      // one per requested estimand
  std::vector<std::optional<double>> rampup;   // empty unless requested; nullopt for t <= t_ru
};

/// Values are nullopt where an estimand is undefined at that time.
std::vector<CurveRow> ve_curves(const Scenario& s, std::span<const double> grid,
                                std::span<const Estimand> kinds, bool include_rampup);

}  // namespace vetk
