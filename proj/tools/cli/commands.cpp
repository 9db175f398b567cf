#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "vetk/discrete.hpp"
#include "vetk/errors.hpp"
#include "vetk/frailty.hpp"
#include "vetk/io.hpp"
#include "vetk/peakdiff.hpp"
#include "vetk/rampup.hpp"
#include "vetk/trial.hpp"

namespace vetk::cli {

using nlohmann::json;
using io::ConfigError;

namespace {

std::string num(double x) { return io::format_double(x); }

std::string opt(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string pct(double ve) { return fixed(100.0 * ve, 1); }

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

template <class T>
std::vector<T> list(const json& config, const char* key) {
  if (!config.contains(key) || !config[key].is_array()) {
    throw ConfigError(std::string("config: '") + key + "' must be an array");
  }
  return config[key].get<std::vector<T>>();
}

// --- estimands --------------------------------------------------------------

RunResult cmd_estimands(const json& config) {
  const Scenario s = io::scenario_from_json(config.at("scenario"));
  const double t = config.contains("at") && !config["at"].is_null() ? config["at"].get<double>() : s.tau;
  const EstimandReport r = estimand_report(s, t);

  std::ostringstream line;
  line << "VE at t=" << num(t) << " (%): CI " << pct(r.ve_ci) << " | IR " << pct(r.ve_ir) << " | Cox "
       << pct(r.ve_cox) << " | CH " << pct(r.ve_ch) << " | odds " << pct(r.ve_odds)
       << " | IR bounds [" << pct(r.ir_bounds.ve_lower()) << ", " << pct(r.ir_bounds.ve_upper())
       << "]";

  json report = {
      {"label", s.label},
      {"tau", s.tau},
      {"at", t},
      {"ve",
       {{"ci", r.ve_ci}, {"ir", r.ve_ir}, {"cox", r.ve_cox}, {"ch", r.ve_ch}, {"odds", r.ve_odds}}},
      {"ir_bounds", {{"ve_lower", r.ir_bounds.ve_lower()}, {"ve_upper", r.ir_bounds.ve_upper()}}},
      {"cox",
       {{"theta", r.cox.theta},
        {"g_at_root", r.cox.g_at_root},
        {"iterations", r.cox.iterations},
        {"multiple_roots_suspected", r.cox.multiple_roots_suspected}}},
      {"summary", line.str()},
  };
  const std::string text = report.dump(2) + "\n";
  return {text + line.str() + "\n", {{"estimands.json", text}}};
}

// --- curve ------------------------------------------------------------------

RunResult cmd_curve(const json& config) {
  const Scenario s = io::scenario_from_json(config.at("scenario"));
  const auto grid = list<double>(config, "grid");
  std::vector<Estimand> kinds;
  for (const auto& k : list<std::string>(config, "kinds")) kinds.push_back(estimand_from_string(k));
  if (kinds.empty()) throw ConfigError("no estimands requested");
  const bool rampup = config.value("rampup", false);

  const auto rows = ve_curves(s, grid, kinds, rampup);
  std::ostringstream csv;
  csv << "# schema: vetk.curve/1\nt";
  for (Estimand k : kinds) csv << ",ve_" << to_string(k);
  if (rampup) {
    for (Estimand k : kinds) csv << ",ve_" << to_string(k) << "_star";
  }
  csv << "\n";
  for (const CurveRow& row : rows) {
    csv << num(row.t);
    for (const auto& v : row.itt) csv << "," << opt(v);
    for (const auto& v : row.rampup) csv << "," << opt(v);
    csv << "\n";
  }
  return {csv.str(), {{"curve.csv", csv.str()}}};
}

// --- peakdiff ---------------------------------------------------------------

RunResult cmd_peakdiff(const json& config) {
  const auto f0s = list<double>(config, "f0");
  const int ve_points = config.value("ve_points", 101);
  const int check_points = config.value("check_points", 500);
  if (ve_points < 2 || check_points < 1) throw ConfigError("peakdiff: grid sizes too small");

  std::vector<double> ve_grid;
  for (int i = 0; i < ve_points; ++i) ve_grid.push_back(static_cast<double>(i) / (ve_points - 1));
  std::ostringstream fig;
  fig << "# schema: vetk.figure1/1\nf0,ve,delta1,delta2\n";
  for (const Figure1Row& r : figure1_data(f0s, ve_grid)) {
    fig << num(r.f0) << "," << num(r.ve) << "," << num(r.delta1) << "," << num(r.delta2) << "\n";
  }

  std::ostringstream peaks, summary;
  peaks << "# schema: vetk.peaks/1\n"
           "f0,delta1_max_pct,delta2_max_pct,delta1_max,delta2_max,f1_argmax_delta1,f1_argmax_delta2\n";
  summary << "max VE_CH-VE_CI = max VE_odds-VE_CH (%):";
  for (double f0 : f0s) {
    const PeakDiffResult a = delta1_max(f0);
    const PeakDiffResult b = delta2_max(f0);
    peaks << num(f0) << "," << fixed(100.0 * a.delta_max, 2) << "," << fixed(100.0 * b.delta_max, 2)
          << "," << num(a.delta_max) << "," << num(b.delta_max) << "," << num(a.f1_argmax) << ","
          << num(b.f1_argmax) << "\n";
    summary << " F0=" << fixed(100.0 * f0, 0) << "%: " << fixed(100.0 * a.delta_max, 2) << ";";
  }
  std::vector<double> check;
  for (int i = 1; i <= check_points; ++i) {
    check.push_back(0.998 * static_cast<double>(i) / check_points);
  }
  const double gap = verify_peak_equality(check);
  char eq[160];
  std::snprintf(eq, sizeof eq, "max |delta1_max - delta2_max| over %d F0 values = %.3g (%s 1e-12)",
                check_points, gap, gap <= 1e-12 ? "<=" : ">");
  const std::string text = summary.str() + "\n" + eq + "\n";
  return {fig.str() + text, {{"figure1.csv", fig.str()}, {"peaks.csv", peaks.str()}}};
}

// --- table-discrete ---------------------------------------------------------

RunResult cmd_table_discrete(const json& config) {
  const double ve = config.at("ve_ch").get<double>();
  const auto f0s = list<double>(config, "f0");
  const auto ks = list<std::size_t>(config, "k");
  std::ostringstream csv;
  csv << "# schema: vetk.table_discrete/1\nk,f0_tau_pct,ve_ch_pct,ve_dh_pct,f0_tau,ve_ch,ve_dh\n";
  for (const DiscreteTableRow& r : table_ve_dh(ve, f0s, ks)) {
    csv << r.k << "," << pct(r.f0_tau) << "," << pct(r.ve_ch) << "," << pct(r.ve_dh) << ","
        << num(r.f0_tau) << "," << num(r.ve_ch) << "," << num(r.ve_dh) << "\n";
  }
  return {csv.str(), {{"table_discrete.csv", csv.str()}}};
}

// --- frailty ----------------------------------------------------------------

RunResult cmd_frailty(const json& config) {
  const FrailtyFamily family = frailty_family_from_string(config.at("family").get<std::string>());
  const auto params = list<double>(config, "params");
  const double theta_id = config.at("theta_id").get<double>();
  const auto grid = list<double>(config, "grid");
  if (!(theta_id > 0.0)) throw DomainError("theta_id must be > 0");

  std::ostringstream csv;
  csv << "# schema: vetk.frailty/1\nx,population_ve,individual_ve,family,parameter,K\n";
  std::vector<FrailtySpec> specs;
  for (double p : params) {
    const FrailtySpec spec =
        family == FrailtyFamily::gamma ? FrailtySpec::gamma(p) : FrailtySpec::positive_stable(p);
    specs.push_back(spec);
    for (double x : grid) {
      // gamma: x is the reference control CDF F0_id(t); stable: the ratio is constant in x
      const double theta_pop = family == FrailtyFamily::gamma
                                   ? gamma_population_hr_ph(theta_id, x, p)
                                   : stable_population_hr(theta_id, p);
      csv << num(x) << "," << num(1.0 - theta_pop) << "," << num(1.0 - theta_id) << ","
          << to_string(family) << "," << num(p) << "," << num(spec.kendall_tau()) << "\n";
    }
  }
  RunResult result{csv.str(), {{"frailty.csv", csv.str()}}};

  const auto cdf_grid = config.contains("cdf_grid") ? list<double>(config, "cdf_grid")
                                                    : std::vector<double>{};
  if (!cdf_grid.empty()) {
    const auto draws = config.value("draws", std::size_t{1'000'000});
    const auto seed = config.value("seed", std::uint64_t{20240229});
    std::ostringstream cdf;
    cdf << "# schema: vetk.frailty_cdf/1\nlog10_u,cdf,family,parameter,K\n";
    for (const FrailtySpec& spec : specs) {
      if (spec.is_degenerate()) continue;
      const auto values = log10_frailty_cdf(spec, cdf_grid, draws, seed);
      for (std::size_t i = 0; i < cdf_grid.size(); ++i) {
        cdf << num(cdf_grid[i]) << "," << num(values[i]) << "," << to_string(family) << ","
            << num(spec.parameter()) << "," << num(spec.kendall_tau()) << "\n";
      }
    }
    result.artifacts.push_back({"frailty_cdf.csv", cdf.str()});
  }
  return result;
}

// --- trial ------------------------------------------------------------------

json arms_json(const std::array<ArmSummary, 2>& arms) {
  json out = json::array();
  for (int z = 0; z < 2; ++z) {
    const ArmSummary& a = arms[static_cast<std::size_t>(z)];
    out.push_back({{"arm", z}, {"subjects", a.subjects}, {"events", a.events},
                   {"person_time", a.person_time}});
  }
  return out;
}

std::string estimates_line(const EstimateSet& e) {
  auto p = [](const std::optional<double>& v) { return v ? pct(*v) : std::string("NA"); };
  std::ostringstream s;
  s << "VE estimates (%): CI " << p(e.ve_ci) << " | IR " << p(e.ve_ir) << " | Cox " << p(e.ve_cox)
    << " | CH " << p(e.ve_ch) << " | odds " << p(e.ve_odds);
  return s.str();
}

RunResult cmd_simulate(const json& config) {
  const TrialConfig tc = io::trial_config_from_json(config.at("trial"));
  const TrialData data = simulate(tc);
  const AnalysisData analysis = data.analysis();
  const EstimateSet est = estimate_all(analysis);

  std::ostringstream csv;
  io::write_trial_csv(csv, analysis);

  json sidecar = {{"schema", "vetk.trial_data/1"},
                  {"data", "trial.csv"},
                  {"config", config.at("trial")},
                  {"seed", tc.seed},
                  {"realized_tau", data.realized_tau},
                  {"calendar_end", data.calendar_end}};

  json estimates = {{"realized_tau", est.realized_tau},
                    {"arms", arms_json(est.arms)},
                    {"ve",
                     {{"ci", opt_json(est.ve_ci)},
                      {"ir", opt_json(est.ve_ir)},
                      {"cox", opt_json(est.ve_cox)},
                      {"ch", opt_json(est.ve_ch)},
                      {"odds", opt_json(est.ve_odds)}}}};
  if (est.cox) {
    const CoxFit& c = *est.cox;
    estimates["cox"] = {{"beta", c.beta},           {"theta", c.theta},
                        {"score", c.score},         {"information", c.information},
                        {"log_likelihood", c.log_likelihood},
                        {"iterations", c.iterations}, {"converged", c.converged},
                        {"monotone", c.monotone}};
  }

  std::ostringstream text;
  text << "subjects " << est.arms[0].subjects << "/" << est.arms[1].subjects << ", events "
       << est.arms[0].events << "/" << est.arms[1].events << " (control/test), realized tau "
       << num(est.realized_tau) << "\n"
       << estimates_line(est) << "\n";
  return {text.str(),
          {{"trial.csv", csv.str()},
           {"trial.json", sidecar.dump(2) + "\n"},
           {"estimates.json", estimates.dump(2) + "\n"}}};
}

RunResult cmd_sweep(const json& config) {
  const TrialConfig tc = io::trial_config_from_json(config.at("trial"));
  const auto ns = list<std::size_t>(config, "n");
  SweepOptions options;
  options.replicates = config.value("replicates", std::size_t{200});
  options.threads = config.value("threads", 0u);
  const auto rows = consistency_sweep(tc, ns, options);

  std::ostringstream csv;
  csv << "# schema: vetk.sweep/1\nn,estimator,replicates,mean,sd,analytic_estimand,bias,se_of_mean\n";
  for (const SweepRow& r : rows) {
    csv << r.n << "," << to_string(r.estimator) << "," << r.replicates << "," << num(r.mean) << ","
        << num(r.sd) << "," << num(r.analytic) << "," << num(r.bias) << "," << num(r.se_of_mean)
        << "\n";
  }
  return {csv.str(), {{"sweep.csv", csv.str()}}};
}

RunResult cmd_fit(const json& config) {
  const TrialConfig tc = io::trial_config_from_json(config.at("trial"));
  const auto knots = list<double>(config, "knots");
  PiecewiseOptions options;
  options.family = piecewise_family_from_string(config.value("family", std::string("constant")));
  options.equal_first_interval = config.value("equal_first_interval", false);
  const auto alphas = list<double>(config, "alphas");

  const AnalysisData data = simulate(tc).analysis();
  const PiecewiseFit fit = fit_piecewise(data, knots, options);

  std::vector<double> grid = config.contains("grid") ? list<double>(config, "grid")
                                                     : std::vector<double>{};
  if (grid.empty()) {
    double start = 0.0;
    for (double k : knots) {
      if (k >= fit.tau) break;
      grid.push_back(0.5 * (start + k));
      start = k;
    }
    grid.push_back(0.5 * (start + fit.tau));
  }

  json intervals = json::array();
  for (const IntervalEstimate& e : fit.intervals) {
    intervals.push_back({{"arm", e.arm},
                         {"interval", e.interval},
                         {"start", e.start},
                         {"end", e.end},
                         {"events", e.events},
                         {"exposure", e.exposure},
                         {"rate", e.rate},
                         {"shape", e.shape},
                         {"scale", e.scale},
                         {"se_rate", e.se_rate},
                         {"unidentifiable", e.unidentifiable},
                         {"fallback_to_constant", e.fallback_to_constant},
                         {"iterations", e.iterations}});
  }
  json report = {{"knots", fit.knots},
                 {"tau", fit.tau},
                 {"family", to_string(fit.family)},
                 {"equal_first_interval", options.equal_first_interval},
                 {"log_likelihood", fit.log_likelihood},
                 {"arms", arms_json(summarize(data))},
                 {"intervals", intervals}};

  std::ostringstream csv;
  csv << "# schema: vetk.sensitivity/1\nt,alpha,population_ve,individual_ve\n";
  for (double alpha : alphas) {
    for (const SensitivityPoint& p : sensitivity_id_ve(fit, alpha, grid)) {
      csv << num(p.t) << "," << num(alpha) << "," << opt(p.population_ve) << ","
          << opt(p.individual_ve) << "\n";
    }
  }
  return {csv.str(), {{"fit.json", report.dump(2) + "\n"}, {"sensitivity.csv", csv.str()}}};
}

}  // namespace

RunResult execute(const std::string& subcommand, const json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  try {
    if (subcommand == "estimands") return cmd_estimands(config);
    if (subcommand == "curve") return cmd_curve(config);
    if (subcommand == "peakdiff") return cmd_peakdiff(config);
    if (subcommand == "table-discrete") return cmd_table_discrete(config);
    if (subcommand == "frailty") return cmd_frailty(config);
    if (subcommand == "simulate") return cmd_simulate(config);
    if (subcommand == "sweep") return cmd_sweep(config);
    if (subcommand == "fit") return cmd_fit(config);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

json config_seed(const std::string& subcommand, const json& config) {
  if (config.contains("trial") && config["trial"].contains("seed")) return config["trial"]["seed"];
  if (subcommand == "frailty" && config.contains("seed")) return config["seed"];
  return nullptr;
}

}  // namespace vetk::cli
