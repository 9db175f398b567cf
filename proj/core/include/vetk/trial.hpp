#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vetk/dist.hpp"
#include "vetk/frailty_spec.hpp"

namespace vetk {

struct FixedTime {
  double tau;
};
struct TotalEvents {
  std::size_t events;
};
using StoppingRule = std::variant<FixedTime, TotalEvents>;

struct SimultaneousAccrual {};
struct UniformAccrual {
  double duration;
};
using Accrual = std::variant<SimultaneousAccrual, UniformAccrual>;

/// Two-arm randomized trial. Subject i in arm z has hazard U_i lambda_z^id(t)
/// on the time-since-randomization clock, U_i drawn from `frailty`.
struct TrialConfig {
  std::size_t n;
  double allocation = 0.5;  // probability of the test arm
  SurvivalModel id_model0;
  SurvivalModel id_model1;
  FrailtySpec frailty = FrailtySpec::none();
  StoppingRule stopping = FixedTime{1.0};
  Accrual accrual = SimultaneousAccrual{};
  std::uint64_t seed = 1;

  void validate() const;
};

struct SubjectRecord {
  std::size_t id;
  int arm;
  double frailty;
  double entry;       // calendar time of randomization
  double event_time;  // since randomization; infinite if never
  double follow_up;   // administrative window since randomization
  bool observed;
};

/// What an estimator may see: frailty and unobserved event times are absent.
struct ObservedRecord {
  std::size_t id;
  int arm;
  double entry;
  double time;  // min(event time, follow-up window)
  bool observed;
};

struct AnalysisData {
  std::vector<ObservedRecord> records;
  double tau;  // realized analysis horizon
};

struct TrialData {
  std::vector<SubjectRecord> subjects;
  double realized_tau;  // longest follow-up window
  double calendar_end;

  AnalysisData analysis() const;
};

/// Deterministic given config.seed. TotalEvents throws SupportExhaustedError
/// when fewer than E events can ever occur.
TrialData simulate(const TrialConfig& config);

// --- estimators -------------------------------------------------------------

struct ArmSummary {
  std::size_t subjects = 0;
  std::size_t events = 0;
  double person_time = 0.0;
};

std::array<ArmSummary, 2> summarize(const AnalysisData& data);

// Plug-in estimators; throw UndefinedEstimandError without control events.
double estimate_ci(const AnalysisData& data);
double estimate_ir(const AnalysisData& data);
double estimate_odds(const AnalysisData& data);
/// Nelson-Aalen per arm at the realized horizon.
double estimate_ch(const AnalysisData& data);

struct CoxFit {
  double beta = 0.0;
  double theta = 1.0;
  double ve = 0.0;
  double score = 0.0;
  double information = 0.0;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  bool monotone = false;  // MLE at +-infinity; beta is then infinite
};

/// Single binary covariate Cox fit, Breslow ties, safeguarded Newton until
/// |score| <= 1e-10. Throws SolverFailureError after 100 iterations.
CoxFit estimate_cox(const AnalysisData& data);
double cox_log_likelihood(const AnalysisData& data, double beta);

struct EstimateSet {
  std::optional<double> ve_ci, ve_ir, ve_cox, ve_ch, ve_odds;
  std::array<ArmSummary, 2> arms;
  double realized_tau = 0.0;
  std::optional<CoxFit> cox;
};

/// All five estimators; an undefined or divergent one is left empty.
EstimateSet estimate_all(const AnalysisData& data);

// --- piecewise fit ----------------------------------------------------------

enum class PiecewiseFamily { constant, weibull_local };
std::string to_string(PiecewiseFamily family);
PiecewiseFamily piecewise_family_from_string(const std::string& name);

struct PiecewiseOptions {
  PiecewiseFamily family = PiecewiseFamily::constant;
  /// Share the first interval's hazard between arms (VE_h = 0 there).
  bool equal_first_interval = false;
  int max_newton_iterations = 100;
};

struct IntervalEstimate {
  int arm;
  std::size_t interval;
  double start;
  double end;
  std::size_t events;
  double exposure;
  double rate;   // constant family; for weibull_local the fitted mean hazard over exposure
  double shape;  // 1 for constant
  double scale;  // 1/rate for constant
  double se_rate;
  bool unidentifiable;
  bool fallback_to_constant;
  int iterations;
};

struct PiecewiseFit {
  std::vector<double> knots;  // interior breakpoints
  double tau;
  PiecewiseFamily family;
  std::vector<IntervalEstimate> intervals;
  std::vector<SurvivalModel> models;  // per arm, last segment open-ended
  double log_likelihood;

  const SurvivalModel& model(int arm) const { return models.at(static_cast<std::size_t>(arm)); }
};

PiecewiseFit fit_piecewise(const AnalysisData& data, std::span<const double> knots,
                           const PiecewiseOptions& options = {});

struct SensitivityPoint {
  double t;
  std::optional<double> population_ve;
  std::optional<double> individual_ve;  // empty before the guard time
};

/// Population VE_h(t) of the fit and the individual VE_h implied by PS(alpha).
std::vector<SensitivityPoint> sensitivity_id_ve(const PiecewiseFit& fit, double alpha,
                                                std::span<const double> grid);

// --- consistency ------------------------------------------------------------

enum class TrialEstimator { ci, ir, cox, ch, odds };
std::string to_string(TrialEstimator e);
inline constexpr TrialEstimator kAllTrialEstimators[] = {
    TrialEstimator::ci, TrialEstimator::ir, TrialEstimator::cox, TrialEstimator::ch,
    TrialEstimator::odds};

struct SweepRow {
  std::size_t n;
  TrialEstimator estimator;
  std::size_t replicates;  // replicates where the estimate was defined
  double mean;
  double sd;
  double analytic;
  double bias;
  double se_of_mean;
};

struct SweepOptions {
  std::size_t replicates = 200;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Population pair implied by the config's individual models and frailty.
std::array<SurvivalModel, 2> population_models(const TrialConfig& config);

/// Replicate r of the j-th sample size uses seed
/// derive_seed(template.seed, (j << 32) | r), so rows never share draws.
std::vector<SweepRow> consistency_sweep(const TrialConfig& config_template,
                                        std::span<const std::size_t> n_list,
                                        const SweepOptions& options = {});

}  // namespace vetk
