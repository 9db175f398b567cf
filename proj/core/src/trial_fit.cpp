#include <algorithm>
#include <cmath>
#include <sstream>

#include "vetk/errors.hpp"
#include "vetk/frailty.hpp"
#include "vetk/trial.hpp"

namespace vetk {

std::string to_string(PiecewiseFamily family) {
  return family == PiecewiseFamily::constant ? "constant" : "weibull_local";
}

PiecewiseFamily piecewise_family_from_string(const std::string& name) {
  if (name == "constant") return PiecewiseFamily::constant;
  if (name == "weibull_local" || name == "weibull") return PiecewiseFamily::weibull_local;
  throw DomainError("unknown piecewise family '" + name + "'");
}

namespace {

// Exposure of one arm within one interval, on the interval's local clock.
struct Cell {
  std::size_t events = 0;
  double exposure = 0.0;
  std::size_t full = 0;          // subjects crossing the whole interval
  std::vector<double> partial;   // local exposure of the rest
  std::vector<char> partial_event;

  void merge(const Cell& other) {
    events += other.events;
    exposure += other.exposure;
    full += other.full;
    partial.insert(partial.end(), other.partial.begin(), other.partial.end());
    partial_event.insert(partial_event.end(), other.partial_event.begin(),
                         other.partial_event.end());
  }
};

struct WeibullEstimate {
  double shape;
  double scale;
  double loglik;
  int iterations;
  bool ok;
};

// Profile likelihood in the shape k, with scale^k = sum x^k / d. Exposures
// are normalised by the interval width so x lies in (0, 1].
WeibullEstimate fit_weibull(const Cell& c, double width, int max_iter) {
  const double d = static_cast<double>(c.events);
  double log_events = 0.0;
  for (std::size_t i = 0; i < c.partial.size(); ++i) {
    if (c.partial_event[i]) log_events += std::log(c.partial[i] / width);
  }
  auto sums = [&](double k) {
    double a = static_cast<double>(c.full), b = 0.0, cc = 0.0;
    for (double x : c.partial) {
      const double y = x / width;
      const double lx = std::log(y);
      const double p = std::pow(y, k);
      a += p;
      b += p * lx;
      cc += p * lx * lx;
    }
    return std::array<double, 3>{a, b, cc};
  };
  auto profile = [&](double k) {
    const auto s = sums(k);
    return d * std::log(k) - d * std::log(s[0] / d) + (k - 1.0) * log_events - d;
  };

  double k = 1.0;
  double value = profile(k);
  for (int iter = 1; iter <= max_iter; ++iter) {
    const auto [a, b, cc] = sums(k);
    const double grad = d / k - d * b / a + log_events;
    const double hess = -d / (k * k) - d * (cc * a - b * b) / (a * a);
    if (std::abs(grad) * k <= 1e-10 * std::max(1.0, d)) {
      const double scale = std::pow(a / d, 1.0 / k) * width;
      // log-likelihood on the original clock: subtract d * ln(width) from the density terms
      return {k, scale, value - d * std::log(width), iter, true};
    }
    if (!(hess < 0.0) || !std::isfinite(hess)) break;
    double step = -grad / hess;
    double next = k + step;
    int halvings = 0;
    while (halvings < 60 && (!(next > 0.0) || profile(next) < value - 1e-12 * (1.0 + std::abs(value)))) {
      step *= 0.5;
      next = k + step;
      ++halvings;
    }
    if (halvings == 60) break;
    k = next;
    value = profile(k);
    if (!std::isfinite(value) || k > 1e3) break;
  }
  return {1.0, 1.0, 0.0, max_iter, false};
}

}  // namespace

PiecewiseFit fit_piecewise(const AnalysisData& data, std::span<const double> knots,
                           const PiecewiseOptions& options) {
  if (!(data.tau > 0.0)) throw DomainError("fit_piecewise: realized tau must be > 0");
  std::vector<double> bounds{0.0};
  for (double k : knots) {
    if (!(k > bounds.back()) || !std::isfinite(k)) {
      throw DomainError("fit_piecewise: knots must be finite, positive and increasing");
    }
    bounds.push_back(k);
  }
  const std::size_t n_int = bounds.size();
  auto interval_end = [&](std::size_t j) { return j + 1 < n_int ? bounds[j + 1] : data.tau; };

  std::vector<std::array<Cell, 2>> cells(n_int);
  for (const ObservedRecord& r : data.records) {
    if (!(r.time > 0.0)) continue;
    // Intervals are (b_j, b_{j+1}], so an event exactly at a knot closes the earlier one.
    const std::size_t last =
        static_cast<std::size_t>(std::lower_bound(bounds.begin(), bounds.end(), r.time) -
                                 bounds.begin()) - 1;
    for (std::size_t j = 0; j <= last && j < n_int; ++j) {
      Cell& c = cells[j][static_cast<std::size_t>(r.arm)];
      const double width = interval_end(j) - bounds[j];
      const double local = std::min(r.time, bounds[j] + width) - bounds[j];
      if (local <= 0.0) continue;
      c.exposure += local;
      const bool event_here = r.observed && j == last;
      if (event_here) ++c.events;
      if (j < last || (local >= width && !event_here)) {
        ++c.full;
      } else {
        c.partial.push_back(local);
        c.partial_event.push_back(event_here ? 1 : 0);
      }
    }
  }

  PiecewiseFit fit{std::vector<double>(knots.begin(), knots.end()), data.tau, options.family, {}, {},
                   0.0};
  std::array<std::vector<HazardSegment>, 2> segments;
  for (std::size_t j = 0; j < n_int; ++j) {
    const double start = bounds[j];
    const double end = interval_end(j);
    const bool pooled_interval = options.equal_first_interval && j == 0;
    const bool unidentifiable = cells[j][0].events + cells[j][1].events == 0;

    for (int arm = 0; arm < 2; ++arm) {
      Cell cell = cells[j][static_cast<std::size_t>(arm)];
      if (pooled_interval) {
        cell = cells[j][0];
        cell.merge(cells[j][1]);
      }
      IntervalEstimate est{arm, j, start, end, cell.events, cell.exposure, 0.0, 1.0, kInfinity,
                           0.0, unidentifiable, false, 0};
      const double d = static_cast<double>(cell.events);
      est.rate = cell.exposure > 0.0 ? d / cell.exposure : 0.0;
      est.se_rate = d > 0.0 ? est.rate / std::sqrt(d) : 0.0;
      est.scale = est.rate > 0.0 ? 1.0 / est.rate : kInfinity;
      HazardShape shape = ConstantHazard{est.rate};
      double loglik = d > 0.0 ? d * std::log(est.rate) - est.rate * cell.exposure : 0.0;

      if (options.family == PiecewiseFamily::weibull_local && cell.events > 0) {
        const auto w = fit_weibull(cell, end - start, options.max_newton_iterations);
        est.iterations = w.iterations;
        if (w.ok) {
          est.shape = w.shape;
          est.scale = w.scale;
          shape = LocalWeibullHazard{w.shape, w.scale};
          loglik = w.loglik;
        } else {
          est.fallback_to_constant = true;
        }
      }
      // A pooled interval contributes its likelihood once.
      if (!pooled_interval || arm == 0) fit.log_likelihood += loglik;
      const double seg_end = j + 1 < n_int ? end : kInfinity;
      segments[static_cast<std::size_t>(arm)].push_back({start, seg_end, shape});
      fit.intervals.push_back(est);
    }
  }
  fit.models.push_back(SurvivalModel::piecewise_hazard(std::move(segments[0])));
  fit.models.push_back(SurvivalModel::piecewise_hazard(std::move(segments[1])));
  return fit;
}

std::vector<SensitivityPoint> sensitivity_id_ve(const PiecewiseFit& fit, double alpha,
                                                std::span<const double> grid) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  std::vector<SensitivityPoint> out;
  out.reserve(grid.size());
  for (double t : grid) {
    SensitivityPoint p{t, std::nullopt, std::nullopt};
    const double h0 = fit.model(0).hazard(t);
    if (h0 > 0.0) p.population_ve = 1.0 - fit.model(1).hazard(t) / h0;
    try {
      p.individual_ve = 1.0 - stable_individual_from_population(fit.model(0), fit.model(1), alpha, t);
    } catch (const UndefinedEstimandError&) {
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace vetk
