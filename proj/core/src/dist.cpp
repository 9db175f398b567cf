#include "vetk/dist.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vetk/errors.hpp"
#include "vetk/numerics.hpp"

namespace vetk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_time(double t, const char* what) {
  if (!(t >= 0.0)) {
    std::ostringstream msg;
    msg << what << ": time must be >= 0 (got " << t << ")";
    throw DomainError(msg.str());
  }
}

[[noreturn]] void exhausted(const char* what, double x) {
  std::ostringstream msg;
  msg << what << ": " << x << " lies beyond the support of the model";
  throw SupportExhaustedError(msg.str());
}

// --- piecewise segments -----------------------------------------------------

double segment_cumulative(const HazardSegment& seg, double t) {
  const double u = t - seg.start;
  return std::visit(
      overloaded{
          [&](const ConstantHazard& h) { return h.rate * u; },
          [&](const LinearHazard& h) {
            return u * (h.intercept + 0.5 * h.slope * (t + seg.start));
          },
          [&](const LocalWeibullHazard& h) { return std::pow(u / h.scale, h.shape); },
          [&](const UniformDensityHazard& h) {
            const double x = h.density * u;
            return x >= 1.0 ? kInfinity : -std::log1p(-x);
          },
      },
      seg.shape);
}

double segment_hazard(const HazardSegment& seg, double t) {
  const double u = t - seg.start;
  return std::visit(
      overloaded{
          [&](const ConstantHazard& h) { return h.rate; },
          [&](const LinearHazard& h) { return std::max(0.0, h.intercept + h.slope * t); },
          [&](const LocalWeibullHazard& h) {
            if (u == 0.0) {
              if (h.shape < 1.0) return kInfinity;
              return h.shape == 1.0 ? 1.0 / h.scale : 0.0;
            }
            return h.shape / h.scale * std::pow(u / h.scale, h.shape - 1.0);
          },
          [&](const UniformDensityHazard& h) {
            const double s = 1.0 - h.density * u;
            return s <= 0.0 ? kInfinity : h.density / s;
          },
      },
      seg.shape);
}

// Offset u >= 0 from the segment start at which the segment accumulates dh;
// infinity when the segment never gets there.
double segment_inverse(const HazardSegment& seg, double dh) {
  return std::visit(
      overloaded{
          [&](const ConstantHazard& h) { return h.rate > 0.0 ? dh / h.rate : kInfinity; },
          [&](const LinearHazard& h) {
            const double hs = h.intercept + h.slope * seg.start;
            const double disc = hs * hs + 2.0 * h.slope * dh;
            if (disc < 0.0) return kInfinity;
            const double denom = hs + std::sqrt(disc);
            return denom > 0.0 ? 2.0 * dh / denom : kInfinity;
          },
          [&](const LocalWeibullHazard& h) { return h.scale * std::pow(dh, 1.0 / h.shape); },
          [&](const UniformDensityHazard& h) {
            return h.density > 0.0 ? -std::expm1(-dh) / h.density : kInfinity;
          },
      },
      seg.shape);
}

void validate_segment(const HazardSegment& seg, bool last) {
  std::ostringstream msg;
  if (!(seg.end > seg.start)) {
    msg << "piecewise segment [" << seg.start << ", " << seg.end << ") is empty";
    throw DomainError(msg.str());
  }
  if (!last && !std::isfinite(seg.end)) {
    throw DomainError("only the last piecewise segment may be open-ended");
  }
  std::visit(
      overloaded{
          [&](const ConstantHazard& h) {
            if (!(h.rate >= 0.0) || !std::isfinite(h.rate)) {
              throw DomainError("constant hazard must be finite and >= 0");
            }
          },
          [&](const LinearHazard& h) {
            const double lo = h.intercept + h.slope * seg.start;
            const bool end_ok = std::isfinite(seg.end) ? h.intercept + h.slope * seg.end >= -1e-15
                                                       : h.slope >= 0.0;
            if (!(lo >= -1e-15) || !end_ok) {
              throw DomainError("linear hazard must be nonnegative on its segment");
            }
          },
          [&](const LocalWeibullHazard& h) {
            if (!(h.shape > 0.0) || !(h.scale > 0.0)) {
              throw DomainError("local Weibull segment needs shape > 0 and scale > 0");
            }
          },
          [&](const UniformDensityHazard& h) {
            if (!(h.density >= 0.0) || !std::isfinite(h.density)) {
              throw DomainError("uniform-density segment needs density >= 0");
            }
            if (std::isfinite(seg.end) && h.density * (seg.end - seg.start) >= 1.0) {
              throw DomainError("uniform-density segment exhausts survival before its end");
            }
          },
      },
      seg.shape);
}

std::size_t segment_index(const SurvivalModel::Piecewise& p, double t) {
  auto it = std::upper_bound(p.segments.begin(), p.segments.end(), t,
                             [](double x, const HazardSegment& s) { return x < s.start; });
  return static_cast<std::size_t>(std::distance(p.segments.begin(), it)) - 1;
}

// --- tabulated --------------------------------------------------------------

double tabulated_cdf(const SurvivalModel::Tabulated& tab, double t) {
  const auto& pts = tab.points;
  if (t > pts.back().first) exhausted("tabulated cdf", t);
  auto it = std::upper_bound(pts.begin(), pts.end(), t,
                             [](double x, const auto& p) { return x < p.first; });
  const std::size_t i = static_cast<std::size_t>(std::distance(pts.begin(), it)) - 1;
  if (i + 1 == pts.size()) return pts.back().second;
  const auto& [t0, f0] = pts[i];
  const auto& [t1, f1] = pts[i + 1];
  return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
}

double tabulated_hazard(const SurvivalModel::Tabulated& tab, double t) {
  const auto& pts = tab.points;
  if (t > pts.back().first) exhausted("tabulated hazard", t);
  auto it = std::upper_bound(pts.begin(), pts.end(), t,
                             [](double x, const auto& p) { return x < p.first; });
  std::size_t i = static_cast<std::size_t>(std::distance(pts.begin(), it)) - 1;
  if (i + 1 == pts.size()) --i;  // at the last point use the left limit
  const double slope = (pts[i + 1].second - pts[i].second) / (pts[i + 1].first - pts[i].first);
  return slope / (1.0 - tabulated_cdf(tab, t));
}

double mixture_transform(const FrailtySpec& fr, double base_cum) {
  if (fr.is_degenerate()) return base_cum;
  if (fr.family() == FrailtyFamily::gamma) {
    const double nu = fr.parameter();
    return std::log1p(nu * base_cum) / nu;
  }
  return std::pow(base_cum, fr.parameter());
}

double mixture_inverse_transform(const FrailtySpec& fr, double h) {
  if (fr.is_degenerate()) return h;
  if (fr.family() == FrailtyFamily::gamma) {
    const double nu = fr.parameter();
    return std::expm1(nu * h) / nu;
  }
  return std::pow(h, 1.0 / fr.parameter());
}

}  // namespace

// --- construction -----------------------------------------------------------

SurvivalModel SurvivalModel::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError("exponential rate must be finite and > 0");
  }
  return SurvivalModel(Exponential{rate});
}

SurvivalModel SurvivalModel::weibull(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
    throw DomainError("Weibull needs finite shape > 0 and scale > 0");
  }
  return SurvivalModel(Weibull{shape, scale});
}

SurvivalModel SurvivalModel::piecewise_hazard(std::vector<HazardSegment> segments) {
  if (segments.empty()) throw DomainError("piecewise hazard needs at least one segment");
  if (segments.front().start != 0.0) throw DomainError("first piecewise segment must start at 0");
  std::vector<double> cum(segments.size(), 0.0);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const bool last = i + 1 == segments.size();
    validate_segment(segments[i], last);
    if (!last) {
      if (segments[i].end != segments[i + 1].start) {
        throw DomainError("piecewise segments must be contiguous");
      }
      cum[i + 1] = cum[i] + segment_cumulative(segments[i], segments[i].end);
    }
  }
  return SurvivalModel(Piecewise{std::move(segments), std::move(cum)});
}

SurvivalModel SurvivalModel::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw DomainError("tabulated CDF needs at least two points");
  if (points.front().first != 0.0 || points.front().second != 0.0) {
    throw DomainError("tabulated CDF must start at (0, 0)");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& [t0, f0] = points[i - 1];
    const auto& [t1, f1] = points[i];
    if (!(t1 > t0) || !std::isfinite(t1)) throw DomainError("tabulated times must increase strictly");
    if (!(f1 >= f0)) throw DomainError("tabulated CDF values must be nondecreasing");
    if (!(f1 < 1.0)) throw DomainError("tabulated CDF values must stay below 1");
  }
  return SurvivalModel(Tabulated{std::move(points)});
}

SurvivalModel SurvivalModel::frailty_mixture(const SurvivalModel& base, const FrailtySpec& frailty) {
  return SurvivalModel(Mixture{std::make_shared<const SurvivalModel>(base), frailty});
}

SurvivalModel SurvivalModel::conditional(const SurvivalModel& base, double origin) {
  require_time(origin, "conditional");
  const double at_origin = base.cumulative_hazard(origin);
  if (!std::isfinite(at_origin)) {
    throw DomainError("cannot condition on survival past a point where S = 0");
  }
  return SurvivalModel(
      Conditional{std::make_shared<const SurvivalModel>(base), origin, at_origin});
}

ModelKind SurvivalModel::kind() const {
  return std::visit(overloaded{
                        [](const Exponential&) { return ModelKind::exponential; },
                        [](const Weibull&) { return ModelKind::weibull; },
                        [](const Piecewise&) { return ModelKind::piecewise_hazard; },
                        [](const Tabulated&) { return ModelKind::tabulated_cdf; },
                        [](const Mixture&) { return ModelKind::frailty_mixture; },
                        [](const Conditional&) { return ModelKind::conditional; },
                    },
                    rep_);
}

std::string SurvivalModel::describe() const {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const Exponential& e) { out << "exponential(rate=" << e.rate << ")"; },
                 [&](const Weibull& w) {
                   out << "weibull(shape=" << w.shape << ", scale=" << w.scale << ")";
                 },
                 [&](const Piecewise& p) {
                   out << "piecewise_hazard(" << p.segments.size() << " segments)";
                 },
                 [&](const Tabulated& t) { out << "tabulated(" << t.points.size() << " points)"; },
                 [&](const Mixture& m) {
                   out << to_string(m.frailty.family()) << "_mixture(" << m.frailty.parameter()
                       << ", " << m.base->describe() << ")";
                 },
                 [&](const Conditional& c) {
                   out << "conditional(origin=" << c.origin << ", " << c.base->describe() << ")";
                 },
             },
             rep_);
  return out.str();
}

// --- functionals ------------------------------------------------------------

double SurvivalModel::cumulative_hazard(double t) const {
  require_time(t, "cumulative_hazard");
  const double value = std::visit(
      overloaded{
          [&](const Exponential& e) { return e.rate * t; },
          [&](const Weibull& w) { return std::pow(t / w.scale, w.shape); },
          [&](const Piecewise& p) {
            const auto& last = p.segments.back();
            if (t > last.end) exhausted("cumulative_hazard", t);
            const std::size_t i = segment_index(p, t);
            return p.cumulative_at_start[i] + segment_cumulative(p.segments[i], t);
          },
          [&](const Tabulated& tab) { return -std::log1p(-tabulated_cdf(tab, t)); },
          [&](const Mixture& m) {
            return mixture_transform(m.frailty, m.base->cumulative_hazard(t));
          },
          [&](const Conditional& c) {
            return c.base->cumulative_hazard(c.origin + t) - c.base_cumulative_at_origin;
          },
      },
      rep_);
  if (!std::isfinite(value)) exhausted("cumulative_hazard", t);
  return value;
}

double SurvivalModel::survival(double t) const {
  if (const auto* tab = as<Tabulated>()) {
    require_time(t, "survival");
    return 1.0 - tabulated_cdf(*tab, t);
  }
  return std::exp(-cumulative_hazard(t));
}

double SurvivalModel::cdf(double t) const {
  if (const auto* tab = as<Tabulated>()) {
    require_time(t, "cdf");
    return tabulated_cdf(*tab, t);
  }
  return -std::expm1(-cumulative_hazard(t));
}

double SurvivalModel::hazard(double t) const {
  require_time(t, "hazard");
  return std::visit(
      overloaded{
          [&](const Exponential& e) { return e.rate; },
          [&](const Weibull& w) {
            if (t == 0.0) {
              if (w.shape < 1.0) return kInfinity;
              return w.shape == 1.0 ? 1.0 / w.scale : 0.0;
            }
            return w.shape / w.scale * std::pow(t / w.scale, w.shape - 1.0);
          },
          [&](const Piecewise& p) {
            if (t > p.segments.back().end) exhausted("hazard", t);
            const std::size_t i = segment_index(p, t);
            const double h = segment_hazard(p.segments[i], t);
            if (!std::isfinite(h) && std::holds_alternative<UniformDensityHazard>(p.segments[i].shape)) {
              exhausted("hazard", t);
            }
            return h;
          },
          [&](const Tabulated& tab) { return tabulated_hazard(tab, t); },
          [&](const Mixture& m) {
            const double base_h = m.base->hazard(t);
            if (m.frailty.is_degenerate()) return base_h;
            const double base_cum = m.base->cumulative_hazard(t);
            if (m.frailty.family() == FrailtyFamily::gamma) {
              return base_h / (1.0 + m.frailty.parameter() * base_cum);
            }
            const double alpha = m.frailty.parameter();
            if (base_cum == 0.0) return base_h > 0.0 ? kInfinity : 0.0;
            return alpha * std::pow(base_cum, alpha - 1.0) * base_h;
          },
          [&](const Conditional& c) { return c.base->hazard(c.origin + t); },
      },
      rep_);
}

double SurvivalModel::density(double t) const { return hazard(t) * survival(t); }

double SurvivalModel::inverse_cumulative_hazard(double h) const {
  if (!(h >= 0.0)) throw DomainError("inverse_cumulative_hazard: h must be >= 0");
  if (h == 0.0) return 0.0;
  if (h > cumulative_hazard_limit()) exhausted("inverse_cumulative_hazard", h);
  return std::visit(
      overloaded{
          [&](const Exponential& e) { return h / e.rate; },
          [&](const Weibull& w) { return w.scale * std::pow(h, 1.0 / w.shape); },
          [&](const Piecewise& p) {
            const auto& cum = p.cumulative_at_start;
            auto it = std::lower_bound(cum.begin(), cum.end(), h);
            if (it != cum.end() && *it == h) {
              return p.segments[static_cast<std::size_t>(std::distance(cum.begin(), it))].start;
            }
            const std::size_t i = static_cast<std::size_t>(std::distance(cum.begin(), it)) - 1;
            const HazardSegment& seg = p.segments[i];
            const double u = segment_inverse(seg, h - cum[i]);
            if (!std::isfinite(u)) exhausted("inverse_cumulative_hazard", h);
            return std::min(seg.start + u, seg.end);
          },
          [&](const Tabulated& tab) {
            const auto& pts = tab.points;
            const double target = -std::expm1(-h);
            auto it = std::lower_bound(pts.begin(), pts.end(), target,
                                       [](const auto& p, double f) { return p.second < f; });
            if (it == pts.end()) {
              if (h == cumulative_hazard_limit()) return pts.back().first;
              exhausted("inverse_cumulative_hazard", h);
            }
            if (it->second == target) return it->first;
            const auto& [t0, f0] = *(it - 1);
            const auto& [t1, f1] = *it;
            return std::min(t0 + (target - f0) * (t1 - t0) / (f1 - f0), t1);
          },
          [&](const Mixture& m) {
            return m.base->inverse_cumulative_hazard(mixture_inverse_transform(m.frailty, h));
          },
          [&](const Conditional& c) {
            return std::max(
                0.0, c.base->inverse_cumulative_hazard(h + c.base_cumulative_at_origin) - c.origin);
          },
      },
      rep_);
}

double SurvivalModel::restricted_mean(double tau) const {
  if (!(tau > 0.0)) throw DomainError("restricted_mean: tau must be > 0");
  if (const auto* e = as<Exponential>()) return -std::expm1(-e->rate * tau) / e->rate;
  if (const auto* tab = as<Tabulated>()) {
    if (tau > tab->points.back().first) exhausted("restricted_mean", tau);
    // S is linear between points, so trapezoids are exact.
    double area = 0.0;
    double prev_t = 0.0, prev_s = 1.0;
    for (std::size_t i = 1; i < tab->points.size() && prev_t < tau; ++i) {
      const double t = std::min(tab->points[i].first, tau);
      const double s = 1.0 - tabulated_cdf(*tab, t);
      area += 0.5 * (prev_s + s) * (t - prev_t);
      prev_t = t;
      prev_s = s;
    }
    return area;
  }
  if (tau > support_end()) exhausted("restricted_mean", tau);
  const auto cuts = knots();
  return numerics::integrate([this](double t) { return survival(t); }, 0.0, tau, cuts).value;
}

std::vector<double> SurvivalModel::knots() const {
  return std::visit(
      overloaded{
          [](const Exponential&) { return std::vector<double>{}; },
          [](const Weibull&) { return std::vector<double>{}; },
          [](const Piecewise& p) {
            std::vector<double> out;
            for (std::size_t i = 1; i < p.segments.size(); ++i) out.push_back(p.segments[i].start);
            return out;
          },
          [](const Tabulated& tab) {
            std::vector<double> out;
            for (std::size_t i = 1; i + 1 < tab.points.size(); ++i) out.push_back(tab.points[i].first);
            return out;
          },
          [](const Mixture& m) { return m.base->knots(); },
          [](const Conditional& c) {
            std::vector<double> out;
            for (double k : c.base->knots()) {
              if (k > c.origin) out.push_back(k - c.origin);
            }
            return out;
          },
      },
      rep_);
}

double SurvivalModel::support_end() const {
  return std::visit(
      overloaded{
          [](const Exponential&) { return kInfinity; },
          [](const Weibull&) { return kInfinity; },
          [](const Piecewise& p) {
            const auto& last = p.segments.back();
            if (std::isfinite(last.end)) return last.end;
            if (const auto* u = std::get_if<UniformDensityHazard>(&last.shape); u && u->density > 0.0) {
              return last.start + 1.0 / u->density;
            }
            return kInfinity;
          },
          [](const Tabulated& tab) { return tab.points.back().first; },
          [](const Mixture& m) { return m.base->support_end(); },
          [](const Conditional& c) { return c.base->support_end() - c.origin; },
      },
      rep_);
}

double SurvivalModel::cumulative_hazard_limit() const {
  return std::visit(
      overloaded{
          [](const Exponential&) { return kInfinity; },
          [](const Weibull&) { return kInfinity; },
          [](const Piecewise& p) {
            const auto& last = p.segments.back();
            const double at_start = p.cumulative_at_start.back();
            if (std::isfinite(last.end)) return at_start + segment_cumulative(last, last.end);
            const bool flat = std::visit(
                overloaded{
                    [](const ConstantHazard& h) { return h.rate == 0.0; },
                    [](const LinearHazard& h) { return h.slope == 0.0 && h.intercept <= 0.0; },
                    [](const LocalWeibullHazard&) { return false; },
                    [](const UniformDensityHazard& h) { return h.density == 0.0; },
                },
                last.shape);
            return flat ? at_start : kInfinity;
          },
          [](const Tabulated& tab) { return -std::log1p(-tab.points.back().second); },
          [](const Mixture& m) {
            return mixture_transform(m.frailty, m.base->cumulative_hazard_limit());
          },
          [](const Conditional& c) {
            return c.base->cumulative_hazard_limit() - c.base_cumulative_at_origin;
          },
      },
      rep_);
}

SurvivalModel scale_hazard(const SurvivalModel& base, double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw DomainError("hazard ratio must be > 0");
  if (const auto* e = base.as<SurvivalModel::Exponential>()) {
    return SurvivalModel::exponential(e->rate * ratio);
  }
  if (const auto* w = base.as<SurvivalModel::Weibull>()) {
    return SurvivalModel::weibull(w->shape, w->scale * std::pow(ratio, -1.0 / w->shape));
  }
  if (const auto* p = base.as<SurvivalModel::Piecewise>()) {
    std::vector<HazardSegment> segs = p->segments;
    for (auto& seg : segs) {
      seg.shape = std::visit(
          overloaded{
              [&](const ConstantHazard& h) -> HazardShape { return ConstantHazard{h.rate * ratio}; },
              [&](const LinearHazard& h) -> HazardShape {
                return LinearHazard{h.intercept * ratio, h.slope * ratio};
              },
              [&](const LocalWeibullHazard& h) -> HazardShape {
                return LocalWeibullHazard{h.shape, h.scale * std::pow(ratio, -1.0 / h.shape)};
              },
              [&](const UniformDensityHazard&) -> HazardShape {
                throw DomainError("scale_hazard: uniform-density segments are not closed under scaling");
              },
          },
          seg.shape);
    }
    return SurvivalModel::piecewise_hazard(std::move(segs));
  }
  throw DomainError("scale_hazard: unsupported model kind " + base.describe());
}

}  // namespace vetk
