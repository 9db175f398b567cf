#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "vetk/dist.hpp"
#include "vetk/frailty_spec.hpp"

namespace vetk {

// --- gamma frailty ----------------------------------------------------------

/// lambda_id(t) / (1 + nu Lambda_id(t)).
double gamma_population_hazard(const SurvivalModel& base, double nu, double t);
/// Population law with Lambda_pop = ln(1 + nu Lambda_id) / nu.
SurvivalModel gamma_population_model(const SurvivalModel& base, double nu);

/// theta_id(t) (1 - nu ln S0_id(t)) / (1 - nu ln S1_id(t)).
double gamma_population_hr(const std::function<double(double)>& theta_id,
                           const SurvivalModel& s0_id, const SurvivalModel& s1_id, double nu,
                           double t);
/// Proportional individual hazards: population ratio as a function of the
/// reference control CDF F0_id(t).
double gamma_population_hr_ph(double theta_id, double f0_id, double nu);

// --- positive-stable frailty ------------------------------------------------

/// Population law S_pop = exp(-Lambda_id^alpha).
SurvivalModel stable_population_model(const SurvivalModel& base, double alpha);
/// theta_id^alpha.
double stable_population_hr(double theta_id, double alpha);

inline constexpr double kStableGuardCumulativeHazard = 1e-8;

/// Individual hazard ratio implied by population models under PS(alpha):
/// (Lambda1/Lambda0)^(1/alpha - 1) * lambda1/lambda0. Throws
/// UndefinedEstimandError while Lambda_pop,0(t) < 1e-8 or lambda_pop,0(t) = 0.
double stable_individual_from_population(const SurvivalModel& pop0, const SurvivalModel& pop1,
                                         double alpha, double t);

// --- sampling ---------------------------------------------------------------

/// Draws one frailty per call from a caller-owned engine. Gamma uses shape
/// 1/nu and scale nu; positive stable uses Kanter's representation
/// U = sin(aV)/sin(V)^(1/a) * (sin((1-a)V)/W)^((1-a)/a), evaluated in logs.
class FrailtySampler {
 public:
  explicit FrailtySampler(const FrailtySpec& spec);
  double operator()(std::mt19937_64& rng);

 private:
  FrailtySpec spec_;
  std::gamma_distribution<double> gamma_;
};

std::vector<double> sample_frailty(const FrailtySpec& spec, std::size_t n, std::uint64_t seed);

/// CDF of log10(U) at each grid point. Gamma is exact (regularized incomplete
/// gamma); positive stable is the empirical CDF of `draws` seeded samples.
std::vector<double> log10_frailty_cdf(const FrailtySpec& spec, std::span<const double> grid,
                                      std::size_t draws = 1'000'000,
                                      std::uint64_t seed = 20240229);

}  // namespace vetk
