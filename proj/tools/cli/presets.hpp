#pragma once

#include <string>
#include <vector>

#include "vetk/estimands.hpp"
#include "vetk/trial.hpp"

namespace vetk::cli {

/// discussion, null, table1, figure3:a..d, rampup:1..3.
Scenario scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

/// two_exponential, null, gamma_frailty, stable_piecewise, event_driven.
TrialConfig trial_preset(const std::string& name);
std::vector<std::string> trial_preset_names();

/// Knots used with the stable_piecewise preset: every 28 days up to 140.
std::vector<double> stable_piecewise_knots();

}  // namespace vetk::cli
