#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "vetk/dist.hpp"
#include "vetk/estimands.hpp"
#include "vetk/frailty_spec.hpp"
#include "vetk/trial.hpp"

namespace vetk::io {

/// Malformed input file or document; carries line/column when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using nlohmann::json;

// Distribution specs:
//   {"kind":"exponential","rate":r}
//   {"kind":"weibull","shape":k,"scale":b}
//   {"kind":"piecewise_hazard","segments":[{"start":s,"end":e|null,"hazard":H},...]}
//     H = {"type":"constant","c":c} | {"type":"linear","a":a,"b":b}
//       | {"type":"weibull_local","shape":k,"scale":b} | {"type":"uniform_density","density":d}
//   {"kind":"tabulated","points":[[t,F],...]}
//   {"kind":"frailty_mixture","base":spec,"frailty":frailty}
// Unknown keys are rejected.
json model_to_json(const SurvivalModel& model);
SurvivalModel model_from_json(const json& j);

/// {"family":"gamma","variance":nu} or {"family":"positive_stable","alpha":a}.
json frailty_to_json(const FrailtySpec& spec);
FrailtySpec frailty_from_json(const json& j);

/// {"f0":spec,"f1":spec,"tau":t,"t_ru":optional,"label":string}.
json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const json& j);

json trial_config_to_json(const TrialConfig& config);
TrialConfig trial_config_from_json(const json& j);

/// Parses a JSON file; syntax errors report line and column.
json read_json_file(const std::filesystem::path& path);
json parse_json_text(const std::string& text, const std::string& source = "<input>");

inline constexpr const char* kTrialCsvSchema = "# schema: vetk.trial_data/1";

/// Schema comment, header id,arm,entry,time,observed, then one row per
/// subject with times printed to 17 significant digits.
void write_trial_csv(std::ostream& out, const AnalysisData& data);
AnalysisData read_trial_csv(std::istream& in, double tau);

/// Shortest decimal that round-trips (the JSON number formatting).
std::string format_double(double x);

}  // namespace vetk::io
