#include "vetk/rampup.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "vetk/errors.hpp"

namespace vetk {

namespace {

std::optional<SurvivalModel> shift_piecewise(const SurvivalModel::Piecewise& p, double t_ru) {
  std::vector<HazardSegment> out;
  for (const HazardSegment& seg : p.segments) {
    if (seg.end <= t_ru) continue;
    HazardSegment shifted = seg;
    shifted.start = std::max(0.0, seg.start - t_ru);
    shifted.end = seg.end - t_ru;
    const double cut = t_ru - seg.start;  // > 0 only for the segment containing t_ru
    if (const auto* lin = std::get_if<LinearHazard>(&seg.shape)) {
      shifted.shape = LinearHazard{lin->intercept + lin->slope * t_ru, lin->slope};
    } else if (const auto* ud = std::get_if<UniformDensityHazard>(&seg.shape); ud && cut > 0.0) {
      shifted.shape = UniformDensityHazard{ud->density / (1.0 - ud->density * cut)};
    } else if (std::holds_alternative<LocalWeibullHazard>(seg.shape) && cut > 0.0) {
      return std::nullopt;
    }
    out.push_back(shifted);
  }
  if (out.size() == 1 && !std::isfinite(out.front().end)) {
    if (const auto* c = std::get_if<ConstantHazard>(&out.front().shape); c && c->rate > 0.0) {
      return SurvivalModel::exponential(c->rate);
    }
  }
  return SurvivalModel::piecewise_hazard(std::move(out));
}

}  // namespace

SurvivalModel conditional_distribution(const SurvivalModel& f, double t_ru) {
  if (!(t_ru >= 0.0)) throw DomainError("conditional_distribution: t_ru must be >= 0");
  if (t_ru == 0.0) return f;
  if (t_ru >= f.support_end() || !(f.cdf(t_ru) < 1.0)) {
    throw DomainError("conditional_distribution: F(t_ru) = 1, nobody is left at risk");
  }
  if (f.as<SurvivalModel::Exponential>()) return f;
  if (const auto* p = f.as<SurvivalModel::Piecewise>()) {
    if (auto shifted = shift_piecewise(*p, t_ru)) return *shifted;
  }
  return SurvivalModel::conditional(f, t_ru);
}

double rampup_ve(Estimand kind, const Scenario& s, double t_star) {
  if (!s.t_ru) throw DomainError("rampup_ve: scenario has no ramp-up time");
  if (!(t_star > 0.0)) throw DomainError("rampup_ve: t_star must be > 0");
  const double t_ru = *s.t_ru;
  const Scenario star(conditional_distribution(s.f0, t_ru), conditional_distribution(s.f1, t_ru),
                      s.tau - t_ru, std::nullopt, s.label.empty() ? "" : s.label + "*");
  return evaluate(kind, star, t_star);
}

double ve_ci_star_from_ve_ci(double ve_ci_t, double f0_t, double f0_tru) {
  if (!(f0_tru >= 0.0) || !(f0_t > f0_tru) || !(f0_t <= 1.0)) {
    throw DomainError("ve_ci_star_from_ve_ci: need 0 <= F0(t_ru) < F0(t) <= 1");
  }
  return ve_ci_t * f0_t / (f0_t - f0_tru);
}

RampUpScenarioParams rampup_preset(int id) {
  RampUpScenarioParams p;
  switch (id) {
    case 1:
      p.psi1 = 1.0;
      p.psi2 = 0.3;
      p.shape = RampShape::step;
      return p;
    case 2:
      p.psi1 = 1.0;
      p.psi2 = 0.3;
      return p;
    case 3:
      p.psi1 = 3.0;
      p.psi2 = 0.7;
      return p;
    default:
      throw DomainError("unknown ramp-up scenario " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
}

Scenario build_scenario(int id) {
  Scenario s = build_scenario(rampup_preset(id));
  s.label = "rampup:" + std::to_string(id);
  return s;
}

Scenario build_scenario(const RampUpScenarioParams& p) {
  if (!(p.t_ru > 0.0 && p.t_ru < p.tau)) throw DomainError("ramp-up needs 0 < t_ru < tau");
  if (!(p.lambda0 > 0.0)) throw DomainError("ramp-up needs lambda0 > 0");
  if (!(p.psi1 > 0.0) || !(p.psi2 > 0.0)) throw DomainError("ramp-up needs psi1, psi2 > 0");

  HazardShape early = ConstantHazard{p.psi1 * p.lambda0};
  if (p.shape == RampShape::linear) {
    early = LinearHazard{p.psi1 * p.lambda0, -(p.psi1 - p.psi2) * p.lambda0 / p.t_ru};
  }
  auto f1 = SurvivalModel::piecewise_hazard({
      HazardSegment{0.0, p.t_ru, early},
      HazardSegment{p.t_ru, kInfinity, ConstantHazard{p.psi2 * p.lambda0}},
  });
  std::ostringstream label;
  label << "rampup(psi1=" << p.psi1 << ", psi2=" << p.psi2 << ")";
  return Scenario(SurvivalModel::exponential(p.lambda0), std::move(f1), p.tau, p.t_ru,
                  label.str());
}

std::vector<CurveRow> ve_curves(const Scenario& s, std::span<const double> grid,
                                std::span<const Estimand> kinds, bool include_rampup) {
  if (include_rampup && !s.t_ru) throw DomainError("ve_curves: scenario has no ramp-up time");
  auto guarded = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const UndefinedEstimandError&) {
      return std::nullopt;
    }
  };
  std::optional<Scenario> star;
  if (include_rampup) {
    star.emplace(conditional_distribution(s.f0, *s.t_ru), conditional_distribution(s.f1, *s.t_ru),
                 s.tau - *s.t_ru);
  }

  std::vector<CurveRow> rows;
  rows.reserve(grid.size());
  for (double t : grid) {
    CurveRow row{t, {}, {}};
    for (Estimand k : kinds) {
      row.itt.push_back(guarded([&] { return evaluate(k, s, t); }));
      if (include_rampup) {
        const double t_star = t - *s.t_ru;
        row.rampup.push_back(t_star > 0.0 ? guarded([&] { return evaluate(k, *star, t_star); })
                                          : std::nullopt);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace vetk
