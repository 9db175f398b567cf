#include "vetk/frailty.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "vetk/errors.hpp"

namespace vetk {

namespace {

void require_nu(double nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("gamma variance nu must be >= 0");
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("stable alpha must lie in (0, 1]");
}

}  // namespace

double gamma_population_hazard(const SurvivalModel& base, double nu, double t) {
  require_nu(nu);
  return base.hazard(t) / (1.0 + nu * base.cumulative_hazard(t));
}

SurvivalModel gamma_population_model(const SurvivalModel& base, double nu) {
  return SurvivalModel::frailty_mixture(base, FrailtySpec::gamma(nu));
}

double gamma_population_hr(const std::function<double(double)>& theta_id,
                           const SurvivalModel& s0_id, const SurvivalModel& s1_id, double nu,
                           double t) {
  require_nu(nu);
  return theta_id(t) * (1.0 + nu * s0_id.cumulative_hazard(t)) /
         (1.0 + nu * s1_id.cumulative_hazard(t));
}

double gamma_population_hr_ph(double theta_id, double f0_id, double nu) {
  require_nu(nu);
  if (!(theta_id > 0.0)) throw DomainError("theta_id must be > 0");
  if (!(f0_id >= 0.0 && f0_id < 1.0)) throw DomainError("F0_id must lie in [0, 1)");
  const double l0 = -std::log1p(-f0_id);
  return theta_id * (1.0 + nu * l0) / (1.0 + theta_id * nu * l0);
}

SurvivalModel stable_population_model(const SurvivalModel& base, double alpha) {
  require_alpha(alpha);
  if (alpha == 1.0) return base;
  return SurvivalModel::frailty_mixture(base, FrailtySpec::positive_stable(alpha));
}

double stable_population_hr(double theta_id, double alpha) {
  require_alpha(alpha);
  if (!(theta_id > 0.0)) throw DomainError("theta_id must be > 0");
  return std::pow(theta_id, alpha);
}

double stable_individual_from_population(const SurvivalModel& pop0, const SurvivalModel& pop1,
                                         double alpha, double t) {
  require_alpha(alpha);
  const double cum0 = pop0.cumulative_hazard(t);
  const double h0 = pop0.hazard(t);
  if (cum0 < kStableGuardCumulativeHazard || !(h0 > 0.0)) {
    throw UndefinedEstimandError("individual hazard ratio undefined before events accrue (t = " +
                                 std::to_string(t) + ")");
  }
  const double ratio = pop1.hazard(t) / h0;
  if (alpha == 1.0) return ratio;
  return std::pow(pop1.cumulative_hazard(t) / cum0, 1.0 / alpha - 1.0) * ratio;
}

FrailtySampler::FrailtySampler(const FrailtySpec& spec)
    : spec_(spec),
      gamma_(spec.family() == FrailtyFamily::gamma && spec.parameter() > 0.0
                 ? std::gamma_distribution<double>(1.0 / spec.parameter(), spec.parameter())
                 : std::gamma_distribution<double>()) {}

double FrailtySampler::operator()(std::mt19937_64& rng) {
  if (spec_.is_degenerate()) return 1.0;
  if (spec_.family() == FrailtyFamily::gamma) return gamma_(rng);

  const double a = spec_.parameter();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double v = 0.0;
  while (v <= 0.0) v = std::numbers::pi * unit(rng);
  double u = 0.0;
  while (u <= 0.0) u = unit(rng);
  const double w = -std::log(u);
  const double log_u = std::log(std::sin(a * v)) - std::log(std::sin(v)) / a +
                       (1.0 - a) / a * (std::log(std::sin((1.0 - a) * v)) - std::log(w));
  return std::exp(log_u);
}

std::vector<double> sample_frailty(const FrailtySpec& spec, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FrailtySampler draw(spec);
  std::vector<double> out(n);
  for (double& x : out) x = draw(rng);
  return out;
}

std::vector<double> log10_frailty_cdf(const FrailtySpec& spec, std::span<const double> grid,
                                      std::size_t draws, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(grid.size());
  if (spec.is_degenerate()) {
    for (double w : grid) out.push_back(w >= 0.0 ? 1.0 : 0.0);
    return out;
  }
  if (spec.family() == FrailtyFamily::gamma) {
    const double nu = spec.parameter();
    for (double w : grid) {
      out.push_back(boost::math::gamma_p(1.0 / nu, std::pow(10.0, w) / nu));
    }
    return out;
  }
  std::vector<double> logs = sample_frailty(spec, draws, seed);
  for (double& x : logs) x = std::log10(x);
  std::sort(logs.begin(), logs.end());
  for (double w : grid) {
    const auto k = std::upper_bound(logs.begin(), logs.end(), w) - logs.begin();
    out.push_back(static_cast<double>(k) / static_cast<double>(logs.size()));
  }
  return out;
}

}  // namespace vetk
