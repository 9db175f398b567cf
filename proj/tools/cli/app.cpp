#include "app.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "digest.hpp"
#include "presets.hpp"
#include "vetk/errors.hpp"
#include "vetk/io.hpp"

namespace vetk::cli {

using nlohmann::json;
using io::ConfigError;

namespace {

namespace fs = std::filesystem;

constexpr const char* kTool = "vetk";
constexpr const char* kVersion = VETK_VERSION;

double parse_number(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("invalid seed '" + s + "'");
  return v;
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("VE_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return parse_seed(v);
}

json scenario_config(const std::string& file, const std::string& preset) {
  if (!file.empty()) return io::scenario_to_json(io::scenario_from_json(io::read_json_file(file)));
  return io::scenario_to_json(scenario_preset(preset));
}

struct TrialSource {
  std::string file;
  std::string preset = "two_exponential";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;

  void attach(CLI::App* sub, bool with_n) {
    sub->add_option("--config", file, "Trial config JSON file");
    sub->add_option("--preset", preset, "Trial preset")->capture_default_str();
    sub->add_option("--seed", seed, "Master seed (VE_SEED overrides)");
    if (with_n) sub->add_option("--n", n, "Number of subjects");
  }

  json resolve() const {
    TrialConfig c = file.empty() ? trial_preset(preset)
                                 : io::trial_config_from_json(io::read_json_file(file));
    if (seed) c.seed = *seed;
    if (const auto e = env_seed()) c.seed = *e;
    if (n) c.n = *n;
    c.validate();
    return io::trial_config_to_json(c);
  }
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw ConfigError("write failed for '" + path.string() + "'");
}

json write_outputs(const fs::path& dir, const std::string& subcommand, const json& config,
                   const RunResult& result) {
  fs::create_directories(dir);
  json outputs = json::array();
  for (const Artifact& a : result.artifacts) {
    write_file(dir / a.path, a.content);
    outputs.push_back({{"path", a.path}, {"sha256", sha256_hex(a.content)}, {"bytes", a.content.size()}});
  }
  json manifest = {{"tool", kTool},
                   {"version", kVersion},
                   {"subcommand", subcommand},
                   {"config", config},
                   {"seed", config_seed(subcommand, config)},
                   {"outputs", outputs}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

int replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
           std::ostream& err) {
  const json m = io::read_json_file(manifest_path);
  if (!m.is_object() || !m.contains("subcommand") || !m.contains("config") || !m.contains("outputs")) {
    throw ConfigError(manifest_path + ": not a run manifest");
  }
  const std::string sub = m["subcommand"].get<std::string>();
  if (sub == "replay") throw ConfigError("cannot replay a replay");
  const RunResult result = execute(sub, m["config"]);
  const json fresh = write_outputs(out_dir, sub, m["config"], result);

  int mismatches = 0;
  for (const json& want : m["outputs"]) {
    const std::string path = want.at("path").get<std::string>();
    const json* got = nullptr;
    for (const json& o : fresh["outputs"]) {
      if (o["path"] == path) got = &o;
    }
    if (got == nullptr || (*got)["sha256"] != want.at("sha256")) {
      err << "digest mismatch: " << path << "\n";
      ++mismatches;
    }
  }
  if (mismatches > 0 || fresh["outputs"].size() != m["outputs"].size()) {
    err << "replay of '" << sub << "' is not identical\n";
    return 1;
  }
  out << "replayed " << sub << ": " << fresh["outputs"].size() << " outputs identical\n";
  return 0;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = text.find(':', start)) != std::string::npos; start = pos + 1) {
      parts.push_back(text.substr(start, pos - start));
    }
    parts.push_back(text.substr(start));
    if (parts.size() != 3) throw ConfigError("grid '" + text + "': expected a:b:n");
    const double a = parse_number(parts[0]);
    const double b = parse_number(parts[1]);
    const double n = parse_number(parts[2]);
    if (n < 1 || n != std::floor(n)) throw ConfigError("grid '" + text + "': n must be a positive integer");
    const auto count = static_cast<std::size_t>(n);
    if (count == 1) return {a};
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(i + 1 == count ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, pos - start);
    if (!item.empty()) out.push_back(parse_number(item));
    start = pos + 1;
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vaccine efficacy estimand toolkit", kTool};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string out_dir;
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Write outputs and manifest.json to this directory");
  };

  // estimands
  std::string scenario_file, scenario_name = "discussion";
  std::optional<double> at;
  auto* est = app.add_subcommand("estimands", "All five estimands of a scenario");
  est->add_option("--scenario", scenario_file, "Scenario JSON file");
  est->add_option("--preset", scenario_name, "Scenario preset")->capture_default_str();
  est->add_option("--at", at, "Evaluation time (default tau)");
  add_out(est);

  // curve
  std::string grid_text, kinds_text = "ci,ir,cox,ch,odds";
  bool rampup = false;
  auto* curve = app.add_subcommand("curve", "Estimands over a time grid");
  curve->add_option("--scenario", scenario_file, "Scenario JSON file");
  curve->add_option("--preset", scenario_name, "Scenario preset")->capture_default_str();
  curve->add_option("--grid", grid_text, "a:b:n or comma list (default 100 points up to tau)");
  curve->add_option("--kinds", kinds_text, "Comma list of ci,ir,cox,ch,odds")->capture_default_str();
  curve->add_flag("--rampup", rampup, "Add the post-ramp-up columns");
  add_out(curve);

  // peakdiff
  std::string f0_text = "0.01,0.1,0.2,0.3,0.4,0.5";
  auto* peak = app.add_subcommand("peakdiff", "VE_CH-VE_CI and VE_odds-VE_CH curves and maxima");
  peak->add_option("--f0", f0_text, "Control attack rates")->capture_default_str();
  add_out(peak);

  // table-discrete
  double ve_ch = 0.5;
  std::string table_f0 = "0.1,0.2", k_text = "1,4,13,52,364";
  auto* table = app.add_subcommand("table-discrete", "Discrete-time hazard ratio VE table");
  table->add_option("--ve-ch", ve_ch, "VE_CH as a fraction")->capture_default_str();
  table->add_option("--f0", table_f0, "Control attack rates at tau")->capture_default_str();
  table->add_option("--k", k_text, "Numbers of assessments")->capture_default_str();
  add_out(table);

  // frailty
  std::string family = "gamma", param_text, kendall_text, frailty_grid = "0:0.99:100", cdf_grid;
  double theta_id = 0.3;
  std::size_t draws = 1'000'000;
  std::optional<std::uint64_t> frailty_seed;
  auto* frail = app.add_subcommand("frailty", "Population VE under gamma or positive-stable frailty");
  frail->add_option("--family", family, "gamma or stable")->capture_default_str();
  frail->add_option("--param", param_text, "Comma list of nu (gamma) or alpha (stable)");
  frail->add_option("--kendall", kendall_text, "Comma list of Kendall's tau instead of --param");
  frail->add_option("--theta-id", theta_id, "Individual hazard ratio")->capture_default_str();
  frail->add_option("--grid", frailty_grid, "Control CDF grid F0_id")->capture_default_str();
  frail->add_option("--cdf-grid", cdf_grid, "log10(U) grid for the frailty CDF");
  frail->add_option("--draws", draws, "Monte Carlo draws for the stable CDF")->capture_default_str();
  frail->add_option("--seed", frailty_seed, "Seed for the stable CDF (VE_SEED overrides)");
  add_out(frail);

  // simulate
  TrialSource sim_src;
  auto* sim = app.add_subcommand("simulate", "Simulate one trial and estimate");
  sim_src.attach(sim, true);
  add_out(sim);

  // sweep
  TrialSource sweep_src;
  std::string n_list = "1000,10000,100000";
  std::size_t replicates = 200;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Estimator consistency over sample sizes");
  sweep_src.attach(sweep, false);
  sweep->add_option("--n", n_list, "Comma list of sample sizes")->capture_default_str();
  sweep->add_option("--replicates", replicates, "Replicates per sample size")->capture_default_str();
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  add_out(sweep);

  // fit
  TrialSource fit_src;
  fit_src.preset = "stable_piecewise";
  std::optional<std::string> knots_text;
  std::string fit_family = "constant", alpha_text = "1,0.99,0.9,0.8,0.7", fit_grid;
  bool equal_first = false;
  auto* fit = app.add_subcommand("fit", "Piecewise fit and individual-VE sensitivity curves");
  fit_src.attach(fit, true);
  fit->add_option("--knots", knots_text, "Interior knots (default: preset knots)");
  fit->add_option("--family", fit_family, "constant or weibull_local")->capture_default_str();
  fit->add_flag("--equal-first", equal_first, "Equal hazards in the first interval");
  fit->add_option("--alpha", alpha_text, "Stable frailty parameters")->capture_default_str();
  fit->add_option("--grid", fit_grid, "Time grid (default interval midpoints)");
  add_out(fit);

  // replay
  std::string manifest_path;
  auto* rep = app.add_subcommand("replay", "Re-run a manifest and check output digests");
  rep->add_option("manifest", manifest_path, "manifest.json")->required();
  rep->add_option("--out", out_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rep->parsed()) return replay(manifest_path, out_dir, out, err);

    std::string name;
    json config;
    if (est->parsed()) {
      name = "estimands";
      config = {{"scenario", scenario_config(scenario_file, scenario_name)},
                {"at", at ? json(*at) : json(nullptr)}};
    } else if (curve->parsed()) {
      name = "curve";
      json scenario = scenario_config(scenario_file, scenario_name);
      std::vector<double> grid;
      if (grid_text.empty()) {
        const double tau = scenario["tau"].get<double>();
        for (int i = 1; i <= 100; ++i) grid.push_back(tau * i / 100.0);
      } else {
        grid = parse_grid(grid_text);
      }
      std::vector<std::string> kinds;
      for (const auto& k : CLI::detail::split(kinds_text, ',')) {
        if (!k.empty()) kinds.push_back(to_string(estimand_from_string(k)));
      }
      config = {{"scenario", scenario}, {"grid", grid}, {"kinds", kinds}, {"rampup", rampup}};
    } else if (peak->parsed()) {
      name = "peakdiff";
      config = {{"f0", parse_grid(f0_text)}, {"ve_points", 101}, {"check_points", 500}};
    } else if (table->parsed()) {
      name = "table-discrete";
      std::vector<std::size_t> ks;
      for (double k : parse_grid(k_text)) {
        if (!(k >= 1) || k != std::floor(k)) throw ConfigError("--k: positive integers expected");
        ks.push_back(static_cast<std::size_t>(k));
      }
      config = {{"ve_ch", ve_ch}, {"f0", parse_grid(table_f0)}, {"k", ks}};
    } else if (frail->parsed()) {
      name = "frailty";
      const FrailtyFamily fam = frailty_family_from_string(family);
      std::vector<double> params;
      if (!kendall_text.empty()) {
        if (!param_text.empty()) throw ConfigError("give --param or --kendall, not both");
        for (double k : parse_grid(kendall_text)) params.push_back(spec_from_tau(fam, k).parameter());
      } else if (!param_text.empty()) {
        params = parse_grid(param_text);
      } else {
        params = fam == FrailtyFamily::gamma ? std::vector<double>{0.0, 0.5, 1.0, 2.0}
                                             : std::vector<double>{1.0, 0.95, 0.8, 0.65, 0.5, 0.25, 0.1};
      }
      std::uint64_t seed = frailty_seed.value_or(20240229);
      if (const auto e = env_seed()) seed = *e;
      config = {{"family", to_string(fam)}, {"params", params}, {"theta_id", theta_id},
                {"grid", parse_grid(frailty_grid)}};
      if (!cdf_grid.empty()) {
        config["cdf_grid"] = parse_grid(cdf_grid);
        config["draws"] = draws;
        config["seed"] = seed;
      }
    } else if (sim->parsed()) {
      name = "simulate";
      config = {{"trial", sim_src.resolve()}};
    } else if (sweep->parsed()) {
      name = "sweep";
      std::vector<std::size_t> ns;
      for (double v : parse_grid(n_list)) {
        if (!(v >= 2) || v != std::floor(v)) throw ConfigError("--n: integers >= 2 expected");
        ns.push_back(static_cast<std::size_t>(v));
      }
      config = {{"trial", sweep_src.resolve()}, {"n", ns}, {"replicates", replicates},
                {"threads", threads}};
    } else if (fit->parsed()) {
      name = "fit";
      std::vector<double> knots;
      if (knots_text) {
        knots = parse_grid(*knots_text);
      } else if (fit_src.file.empty() && fit_src.preset == "stable_piecewise") {
        knots = stable_piecewise_knots();
      }
      config = {{"trial", fit_src.resolve()},
                {"knots", knots},
                {"family", to_string(piecewise_family_from_string(fit_family))},
                {"equal_first_interval", equal_first},
                {"alphas", parse_grid(alpha_text)}};
      if (!fit_grid.empty()) config["grid"] = parse_grid(fit_grid);
    }

    const RunResult result = execute(name, config);
    if (!out_dir.empty()) {
      write_outputs(out_dir, name, config, result);
      for (const Artifact& a : result.artifacts) out << "wrote " << (fs::path(out_dir) / a.path).string() << "\n";
      out << "wrote " << (fs::path(out_dir) / "manifest.json").string() << "\n";
    } else {
      out << result.stdout_text;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace vetk::cli
