#include "vetk/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>

#include "vetk/errors.hpp"

namespace vetk::io {

namespace {

void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  require_object(j, what);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(what + ": unknown key '" + key + "'");
  }
}

const json& field(const json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(what + ": missing key '" + key + "'");
  return *it;
}

double number(const json& j, const char* key, const std::string& what) {
  const json& v = field(j, key, what);
  if (!v.is_number()) throw ConfigError(what + ": '" + key + "' must be a number");
  return v.get<double>();
}

std::string text(const json& j, const char* key, const std::string& what) {
  const json& v = field(j, key, what);
  if (!v.is_string()) throw ConfigError(what + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t unsigned_integer(const json& j, const char* key, const std::string& what) {
  const json& v = field(j, key, what);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(what + ": '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

json hazard_to_json(const HazardShape& shape) {
  return std::visit(
      [](const auto& h) -> json {
        using T = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<T, ConstantHazard>) {
          return {{"type", "constant"}, {"c", h.rate}};
        } else if constexpr (std::is_same_v<T, LinearHazard>) {
          return {{"type", "linear"}, {"a", h.intercept}, {"b", h.slope}};
        } else if constexpr (std::is_same_v<T, LocalWeibullHazard>) {
          return {{"type", "weibull_local"}, {"shape", h.shape}, {"scale", h.scale}};
        } else {
          return {{"type", "uniform_density"}, {"density", h.density}};
        }
      },
      shape);
}

HazardShape hazard_from_json(const json& j) {
  const std::string what = "hazard";
  require_object(j, what);
  const std::string type = text(j, "type", what);
  if (type == "constant") {
    check_keys(j, {"type", "c"}, what);
    return ConstantHazard{number(j, "c", what)};
  }
  if (type == "linear") {
    check_keys(j, {"type", "a", "b"}, what);
    return LinearHazard{number(j, "a", what), number(j, "b", what)};
  }
  if (type == "weibull_local") {
    check_keys(j, {"type", "shape", "scale"}, what);
    return LocalWeibullHazard{number(j, "shape", what), number(j, "scale", what)};
  }
  if (type == "uniform_density") {
    check_keys(j, {"type", "density"}, what);
    return UniformDensityHazard{number(j, "density", what)};
  }
  throw ConfigError("hazard: unknown type '" + type + "'");
}

}  // namespace

std::string format_double(double x) { return json(x).dump(); }

json model_to_json(const SurvivalModel& model) {
  if (const auto* e = model.as<SurvivalModel::Exponential>()) {
    return {{"kind", "exponential"}, {"rate", e->rate}};
  }
  if (const auto* w = model.as<SurvivalModel::Weibull>()) {
    return {{"kind", "weibull"}, {"shape", w->shape}, {"scale", w->scale}};
  }
  if (const auto* p = model.as<SurvivalModel::Piecewise>()) {
    json segs = json::array();
    for (const HazardSegment& s : p->segments) {
      json seg = {{"start", s.start}, {"hazard", hazard_to_json(s.shape)}};
      seg["end"] = std::isfinite(s.end) ? json(s.end) : json(nullptr);
      segs.push_back(seg);
    }
    return {{"kind", "piecewise_hazard"}, {"segments", segs}};
  }
  if (const auto* t = model.as<SurvivalModel::Tabulated>()) {
    json pts = json::array();
    for (const auto& [x, f] : t->points) pts.push_back({x, f});
    return {{"kind", "tabulated"}, {"points", pts}};
  }
  if (const auto* m = model.as<SurvivalModel::Mixture>()) {
    return {{"kind", "frailty_mixture"},
            {"base", model_to_json(*m->base)},
            {"frailty", frailty_to_json(m->frailty)}};
  }
  throw ConfigError("model has no file representation: " + model.describe());
}

SurvivalModel model_from_json(const json& j) {
  const std::string what = "distribution";
  require_object(j, what);
  const std::string kind = text(j, "kind", what);
  try {
    if (kind == "exponential") {
      check_keys(j, {"kind", "rate"}, what);
      return SurvivalModel::exponential(number(j, "rate", what));
    }
    if (kind == "weibull") {
      check_keys(j, {"kind", "shape", "scale"}, what);
      return SurvivalModel::weibull(number(j, "shape", what), number(j, "scale", what));
    }
    if (kind == "piecewise_hazard") {
      check_keys(j, {"kind", "segments"}, what);
      const json& segs = field(j, "segments", what);
      if (!segs.is_array()) throw ConfigError("distribution: 'segments' must be an array");
      std::vector<HazardSegment> out;
      for (const json& s : segs) {
        check_keys(s, {"start", "end", "hazard"}, "segment");
        HazardSegment seg;
        seg.start = number(s, "start", "segment");
        if (auto it = s.find("end"); it != s.end() && !it->is_null()) {
          seg.end = number(s, "end", "segment");
        }
        seg.shape = hazard_from_json(field(s, "hazard", "segment"));
        out.push_back(seg);
      }
      return SurvivalModel::piecewise_hazard(std::move(out));
    }
    if (kind == "tabulated") {
      check_keys(j, {"kind", "points"}, what);
      const json& pts = field(j, "points", what);
      if (!pts.is_array()) throw ConfigError("distribution: 'points' must be an array");
      std::vector<std::pair<double, double>> out;
      for (const json& p : pts) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          throw ConfigError("distribution: each point must be [t, F]");
        }
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      return SurvivalModel::tabulated(std::move(out));
    }
    if (kind == "frailty_mixture") {
      check_keys(j, {"kind", "base", "frailty"}, what);
      return SurvivalModel::frailty_mixture(model_from_json(field(j, "base", what)),
                                            frailty_from_json(field(j, "frailty", what)));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("distribution '") + kind + "': " + e.what());
  }
  throw ConfigError("distribution: unknown kind '" + kind + "'");
}

json frailty_to_json(const FrailtySpec& spec) {
  if (spec.family() == FrailtyFamily::gamma) {
    return {{"family", "gamma"}, {"variance", spec.parameter()}};
  }
  return {{"family", "positive_stable"}, {"alpha", spec.parameter()}};
}

FrailtySpec frailty_from_json(const json& j) {
  if (j.is_null()) return FrailtySpec::none();
  const std::string what = "frailty";
  require_object(j, what);
  try {
    const FrailtyFamily family = frailty_family_from_string(text(j, "family", what));
    if (family == FrailtyFamily::gamma) {
      check_keys(j, {"family", "variance"}, what);
      return FrailtySpec::gamma(number(j, "variance", what));
    }
    check_keys(j, {"family", "alpha"}, what);
    return FrailtySpec::positive_stable(number(j, "alpha", what));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("frailty: ") + e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json j = {{"f0", model_to_json(s.f0)}, {"f1", model_to_json(s.f1)}, {"tau", s.tau},
            {"label", s.label}};
  if (s.t_ru) j["t_ru"] = *s.t_ru;
  return j;
}

Scenario scenario_from_json(const json& j) {
  const std::string what = "scenario";
  check_keys(j, {"f0", "f1", "tau", "t_ru", "label"}, what);
  std::optional<double> t_ru;
  if (auto it = j.find("t_ru"); it != j.end() && !it->is_null()) t_ru = number(j, "t_ru", what);
  std::string label;
  if (j.contains("label")) label = text(j, "label", what);
  try {
    return Scenario(model_from_json(field(j, "f0", what)), model_from_json(field(j, "f1", what)),
                    number(j, "tau", what), t_ru, label);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

json trial_config_to_json(const TrialConfig& c) {
  json j = {{"n", c.n},
            {"allocation", c.allocation},
            {"id_model0", model_to_json(c.id_model0)},
            {"id_model1", model_to_json(c.id_model1)},
            {"frailty", c.frailty.is_degenerate() ? json(nullptr) : frailty_to_json(c.frailty)},
            {"seed", c.seed}};
  if (const auto* ft = std::get_if<FixedTime>(&c.stopping)) {
    j["stopping"] = {{"type", "fixed_time"}, {"tau", ft->tau}};
  } else {
    j["stopping"] = {{"type", "total_events"}, {"events", std::get<TotalEvents>(c.stopping).events}};
  }
  if (const auto* ua = std::get_if<UniformAccrual>(&c.accrual)) {
    j["accrual"] = {{"type", "uniform"}, {"duration", ua->duration}};
  } else {
    j["accrual"] = {{"type", "simultaneous"}};
  }
  return j;
}

TrialConfig trial_config_from_json(const json& j) {
  const std::string what = "trial config";
  check_keys(j, {"n", "allocation", "id_model0", "id_model1", "frailty", "stopping", "accrual", "seed"},
             what);
  TrialConfig c{static_cast<std::size_t>(unsigned_integer(j, "n", what)), 0.5,
                model_from_json(field(j, "id_model0", what)),
                model_from_json(field(j, "id_model1", what))};
  if (j.contains("allocation")) c.allocation = number(j, "allocation", what);
  if (j.contains("frailty")) c.frailty = frailty_from_json(j["frailty"]);
  if (j.contains("seed")) c.seed = unsigned_integer(j, "seed", what);

  const json& stop = field(j, "stopping", what);
  const std::string stop_type = text(stop, "type", "stopping");
  if (stop_type == "fixed_time") {
    check_keys(stop, {"type", "tau"}, "stopping");
    c.stopping = FixedTime{number(stop, "tau", "stopping")};
  } else if (stop_type == "total_events") {
    check_keys(stop, {"type", "events"}, "stopping");
    c.stopping = TotalEvents{static_cast<std::size_t>(unsigned_integer(stop, "events", "stopping"))};
  } else {
    throw ConfigError("stopping: unknown type '" + stop_type + "'");
  }

  if (auto it = j.find("accrual"); it != j.end()) {
    const std::string acc_type = text(*it, "type", "accrual");
    if (acc_type == "simultaneous") {
      check_keys(*it, {"type"}, "accrual");
      c.accrual = SimultaneousAccrual{};
    } else if (acc_type == "uniform") {
      check_keys(*it, {"type", "duration"}, "accrual");
      c.accrual = UniformAccrual{number(*it, "duration", "accrual")};
    } else {
      throw ConfigError("accrual: unknown type '" + acc_type + "'");
    }
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("trial config: ") + e.what());
  }
  return c;
}

json parse_json_text(const std::string& text_in, const std::string& source) {
  try {
    return json::parse(text_in);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text_in.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text_in[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": JSON syntax error: " << e.what();
    throw ConfigError(msg.str());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

void write_trial_csv(std::ostream& out, const AnalysisData& data) {
  out << kTrialCsvSchema << "\n";
  out << "id,arm,entry,time,observed\n";
  char line[160];
  for (const ObservedRecord& r : data.records) {
    std::snprintf(line, sizeof line, "%zu,%d,%.17g,%.17g,%d\n", r.id, r.arm, r.entry, r.time,
                  r.observed ? 1 : 0);
    out << line;
  }
}

AnalysisData read_trial_csv(std::istream& in, double tau) {
  AnalysisData data{{}, tau};
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "id,arm,entry,time,observed") {
        throw ConfigError("trial CSV line " + std::to_string(line_no) + ": unexpected header");
      }
      header_seen = true;
      continue;
    }
    ObservedRecord r{};
    int observed = 0;
    if (std::sscanf(line.c_str(), "%zu,%d,%lf,%lf,%d", &r.id, &r.arm, &r.entry, &r.time, &observed) != 5 ||
        (r.arm != 0 && r.arm != 1) || (observed != 0 && observed != 1)) {
      throw ConfigError("trial CSV line " + std::to_string(line_no) + ": malformed row");
    }
    r.observed = observed == 1;
    data.records.push_back(r);
  }
  if (!header_seen) throw ConfigError("trial CSV: missing header");
  return data;
}

}  // namespace vetk::io
