#include "presets.hpp"

#include <algorithm>
#include <cmath>

#include "vetk/errors.hpp"
#include "vetk/rampup.hpp"

namespace vetk::cli {

namespace {

// Two exponentials through F0(tau) and F1(tau).
Scenario exponential_pair(double f0_tau, double f1_tau, double tau, std::string label) {
  return Scenario(SurvivalModel::exponential(-std::log1p(-f0_tau) / tau),
                  SurvivalModel::exponential(-std::log1p(-f1_tau) / tau), tau, std::nullopt,
                  std::move(label));
}

// Hazard `rate1` up to `cut`, then F1 rises linearly to f1_end at t = 1.
SurvivalModel linear_tail(double rate1, double cut, double f1_end) {
  const double f_cut = -std::expm1(-rate1 * cut);
  const double density = std::max(0.0, f1_end - f_cut) / ((1.0 - f_cut) * (1.0 - cut));
  return SurvivalModel::piecewise_hazard({
      HazardSegment{0.0, cut, ConstantHazard{rate1}},
      HazardSegment{cut, kInfinity, UniformDensityHazard{density}},
  });
}

Scenario figure3(char panel) {
  const double l0 = std::log(2.0);
  const double f1_end = 1.0 - std::sqrt(0.5);  // panel (a) at t = 1
  const auto f0 = SurvivalModel::exponential(l0);
  const std::string label = std::string("figure3:") + panel;
  switch (panel) {
    case 'a': return Scenario(f0, SurvivalModel::exponential(0.5 * l0), 1.0, std::nullopt, label);
    case 'b': return Scenario(f0, linear_tail(l0, 0.1, f1_end), 1.0, std::nullopt, label);
    case 'c': return Scenario(f0, linear_tail(l0, 0.5, f1_end), 1.0, std::nullopt, label);
    case 'd': return Scenario(f0, linear_tail(l0 / 10.0, 0.9, f1_end), 1.0, std::nullopt, label);
    default: throw DomainError("unknown panel");
  }
}

SurvivalModel piecewise_constant(const std::vector<double>& knots, const std::vector<double>& rates) {
  std::vector<HazardSegment> segs;
  double start = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double end = i < knots.size() ? knots[i] : kInfinity;
    segs.push_back({start, end, ConstantHazard{rates[i]}});
    start = end;
  }
  return SurvivalModel::piecewise_hazard(std::move(segs));
}

}  // namespace

Scenario scenario_preset(const std::string& name) {
  if (name == "discussion") return exponential_pair(0.065, 0.008, 182.0, name);
  if (name == "null") return exponential_pair(0.1, 0.1, 1.0, name);
  if (name == "table1") {
    // VE_CH = 50% with F0(tau) = 10% over a 364-day year.
    const double cum0 = -std::log1p(-0.1);
    return Scenario(SurvivalModel::exponential(cum0 / 364.0),
                    SurvivalModel::exponential(0.5 * cum0 / 364.0), 364.0, std::nullopt, name);
  }
  if (name.size() == 9 && name.starts_with("figure3:")) return figure3(name[8]);
  if (name.size() == 8 && name.starts_with("rampup:") && name[7] >= '1' && name[7] <= '3') {
    return build_scenario(name[7] - '0');
  }
  throw DomainError("unknown scenario preset '" + name + "'");
}

std::vector<std::string> scenario_preset_names() {
  return {"discussion", "null",     "table1",   "figure3:a", "figure3:b",
          "figure3:c",  "figure3:d", "rampup:1", "rampup:2",  "rampup:3"};
}

std::vector<double> stable_piecewise_knots() { return {28.0, 56.0, 84.0, 112.0, 140.0}; }

TrialConfig trial_preset(const std::string& name) {
  if (name == "two_exponential" || name == "null" || name == "event_driven") {
    const double l0 = -std::log(0.9);  // F0(1) = 10%
    const double ratio = name == "null" ? 1.0 : 0.5;
    TrialConfig c{100000, 0.5, SurvivalModel::exponential(l0), SurvivalModel::exponential(ratio * l0)};
    c.stopping = FixedTime{1.0};
    c.seed = 20240601;
    if (name == "event_driven") {
      c.n = 20000;
      c.stopping = TotalEvents{1500};
      c.accrual = UniformAccrual{0.5};
    }
    return c;
  }
  if (name == "gamma_frailty") {
    TrialConfig c{100000, 0.5, SurvivalModel::exponential(1.0), SurvivalModel::exponential(0.3)};
    c.frailty = FrailtySpec::gamma(1.0);
    c.stopping = FixedTime{1.0};
    c.seed = 20240602;
    return c;
  }
  if (name == "stable_piecewise") {
    const auto knots = stable_piecewise_knots();
    const std::vector<double> rates{0.004, 0.003, 0.003, 0.0025, 0.0025, 0.002};
    std::vector<double> test_rates;
    for (double r : rates) test_rates.push_back(0.3 * r);
    TrialConfig c{200000, 0.5, piecewise_constant(knots, rates), piecewise_constant(knots, test_rates)};
    c.frailty = FrailtySpec::positive_stable(0.7);
    c.stopping = FixedTime{168.0};
    c.seed = 20240603;
    return c;
  }
  throw DomainError("unknown trial preset '" + name + "'");
}

std::vector<std::string> trial_preset_names() {
  return {"two_exponential", "null", "gamma_frailty", "stable_piecewise", "event_driven"};
}

}  // namespace vetk::cli
