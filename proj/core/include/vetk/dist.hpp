#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vetk/frailty_spec.hpp"

namespace vetk {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Hazard a + b*t on a segment, with t on the absolute (study) clock.
struct LinearHazard {
  double intercept = 0.0;
  double slope = 0.0;
};

struct ConstantHazard {
  double rate = 0.0;
};

/// Weibull hazard whose time origin is the segment start:
/// lambda(t) = (k/b) * ((t - start)/b)^(k-1).
struct LocalWeibullHazard {
  double shape = 1.0;
  double scale = 1.0;
};

/// Constant event density among those alive at the segment start: the
/// conditional CDF rises linearly, F(t | T > start) = density * (t - start).
/// This is the hazard of a linearly interpolated CDF segment.
struct UniformDensityHazard {
  double density = 0.0;
};

using HazardShape =
    std::variant<ConstantHazard, LinearHazard, LocalWeibullHazard, UniformDensityHazard>;

struct HazardSegment {
  double start = 0.0;
  double end = kInfinity;  // only the last segment may be open-ended
  HazardShape shape;
};

enum class ModelKind {
  exponential,
  weibull,
  piecewise_hazard,
  tabulated_cdf,
  frailty_mixture,
  conditional
};

/// Distribution of the time to first event.
///
/// An immutable value type; copies share any nested base model. Weibull uses
/// S(t) = exp(-(t/scale)^shape). Improper distributions (S(inf) > 0) are
/// allowed: a piecewise model whose last open segment has zero hazard, or a
/// tabulated CDF, has a bounded cumulative hazard and the inverse cumulative
/// hazard then has bounded range.
///
/// Hazards at a discontinuity are right limits. Every functional throws
/// DomainError for t < 0 and SupportExhaustedError past the end of the
/// support (tabulated models never extrapolate beyond their last point).
class SurvivalModel {
 public:
  struct Exponential {
    double rate;
  };
  struct Weibull {
    double shape;
    double scale;
  };
  struct Piecewise {
    std::vector<HazardSegment> segments;
    std::vector<double> cumulative_at_start;  // Lambda at each segment start
  };
  struct Tabulated {
    std::vector<std::pair<double, double>> points;  // (t, F(t)), starts at (0,0)
  };
  /// Population law of base under frailty: S_pop(t) = L(Lambda_base(t)) with L
  /// the frailty Laplace transform.
  struct Mixture {
    std::shared_ptr<const SurvivalModel> base;
    FrailtySpec frailty;
  };
  /// base conditioned on T > origin, on the clock t* = t - origin.
  struct Conditional {
    std::shared_ptr<const SurvivalModel> base;
    double origin;
    double base_cumulative_at_origin;
  };

  static SurvivalModel exponential(double rate);
  static SurvivalModel weibull(double shape, double scale);
  static SurvivalModel piecewise_hazard(std::vector<HazardSegment> segments);
  static SurvivalModel tabulated(std::vector<std::pair<double, double>> points);
  static SurvivalModel frailty_mixture(const SurvivalModel& base, const FrailtySpec& frailty);
  /// Raw conditional wrapper; prefer rampup's conditional_distribution, which
  /// returns closed-form models where it can.
  static SurvivalModel conditional(const SurvivalModel& base, double origin);

  ModelKind kind() const;
  std::string describe() const;

  double cdf(double t) const;
  double survival(double t) const;
  double density(double t) const;
  double hazard(double t) const;
  double cumulative_hazard(double t) const;
  double inverse_cumulative_hazard(double h) const;
  /// Integral of S over [0, tau].
  double restricted_mean(double tau) const;
  /// Hazard or density discontinuities, increasing.
  std::vector<double> knots() const;

  /// Largest t at which the model is defined (infinite unless tabulated or
  /// the last piecewise segment is closed).
  double support_end() const;
  /// sup of Lambda over the support (infinite for proper distributions).
  double cumulative_hazard_limit() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&rep_);
  }

 private:
  using Rep = std::variant<Exponential, Weibull, Piecewise, Tabulated, Mixture, Conditional>;
  explicit SurvivalModel(Rep rep) : rep_(std::move(rep)) {}

  Rep rep_;
};

// Free-function spellings of the model functionals.
inline double cdf(const SurvivalModel& m, double t) { return m.cdf(t); }
inline double hazard(const SurvivalModel& m, double t) { return m.hazard(t); }
inline double cumulative_hazard(const SurvivalModel& m, double t) {
  return m.cumulative_hazard(t);
}
inline double inverse_cumulative_hazard(const SurvivalModel& m, double h) {
  return m.inverse_cumulative_hazard(h);
}
inline double restricted_mean(const SurvivalModel& m, double tau) {
  return m.restricted_mean(tau);
}
inline std::vector<double> knots(const SurvivalModel& m) { return m.knots(); }

/// Piecewise-hazard model with proportional hazard `ratio * base` expressed as
/// a new segment list; only valid for piecewise/exponential/weibull bases.
SurvivalModel scale_hazard(const SurvivalModel& base, double ratio);

}  // namespace vetk
