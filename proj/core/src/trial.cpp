#include "vetk/trial.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "vetk/errors.hpp"
#include "vetk/estimands.hpp"
#include "vetk/frailty.hpp"
#include "vetk/numerics.hpp"

namespace vetk {

void TrialConfig::validate() const {
  if (n < 2) throw DomainError("trial needs n >= 2");
  if (!(allocation > 0.0 && allocation < 1.0)) throw DomainError("allocation must lie in (0, 1)");
  if (const auto* ft = std::get_if<FixedTime>(&stopping); ft && !(ft->tau > 0.0)) {
    throw DomainError("fixed-time stopping needs tau > 0");
  }
  if (const auto* te = std::get_if<TotalEvents>(&stopping); te && te->events < 1) {
    throw DomainError("event-driven stopping needs E >= 1");
  }
  if (const auto* ua = std::get_if<UniformAccrual>(&accrual); ua && !(ua->duration >= 0.0)) {
    throw DomainError("accrual duration must be >= 0");
  }
}

AnalysisData TrialData::analysis() const {
  AnalysisData out{{}, realized_tau};
  out.records.reserve(subjects.size());
  for (const SubjectRecord& s : subjects) {
    out.records.push_back(
        {s.id, s.arm, s.entry, s.observed ? s.event_time : s.follow_up, s.observed});
  }
  return out;
}

TrialData simulate(const TrialConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> unit_exp(1.0);
  FrailtySampler draw_frailty(config.frailty);
  const SurvivalModel* models[2] = {&config.id_model0, &config.id_model1};
  const double limits[2] = {config.id_model0.cumulative_hazard_limit(),
                            config.id_model1.cumulative_hazard_limit()};
  const double accrual_span =
      std::holds_alternative<UniformAccrual>(config.accrual)
          ? std::get<UniformAccrual>(config.accrual).duration
          : 0.0;

  TrialData data{{}, 0.0, 0.0};
  data.subjects.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const int arm = unit(rng) < config.allocation ? 1 : 0;
    const double u = draw_frailty(rng);
    const double e = unit_exp(rng);
    const double entry = accrual_span > 0.0 ? accrual_span * unit(rng) : 0.0;
    const double h = e / u;
    double t = kInfinity;
    if (u > 0.0 && h < limits[arm]) t = models[arm]->inverse_cumulative_hazard(h);
    data.subjects.push_back({i, arm, u, entry, t, 0.0, false});
  }

  if (const auto* ft = std::get_if<FixedTime>(&config.stopping)) {
    double last_entry = 0.0;
    for (SubjectRecord& s : data.subjects) {
      s.follow_up = ft->tau;
      s.observed = s.event_time <= ft->tau;
      last_entry = std::max(last_entry, s.entry);
    }
    data.realized_tau = ft->tau;
    data.calendar_end = last_entry + ft->tau;
    return data;
  }

  const std::size_t target = std::get<TotalEvents>(config.stopping).events;
  std::vector<double> calendar;
  calendar.reserve(data.subjects.size());
  for (const SubjectRecord& s : data.subjects) {
    if (std::isfinite(s.event_time)) calendar.push_back(s.entry + s.event_time);
  }
  if (calendar.size() < target) {
    std::ostringstream msg;
    msg << "unreachable event target: only " << calendar.size() << " of " << config.n
        << " subjects ever have an event, " << target << " required";
    throw SupportExhaustedError(msg.str());
  }
  std::nth_element(calendar.begin(), calendar.begin() + static_cast<std::ptrdiff_t>(target - 1),
                   calendar.end());
  const double stop = calendar[target - 1];

  // Subjects randomized after the stop never enter the analysis.
  std::erase_if(data.subjects, [&](const SubjectRecord& s) { return s.entry >= stop; });
  double first_entry = kInfinity;
  for (SubjectRecord& s : data.subjects) {
    s.follow_up = stop - s.entry;
    s.observed = s.entry + s.event_time <= stop;
    first_entry = std::min(first_entry, s.entry);
  }
  data.realized_tau = stop - first_entry;
  data.calendar_end = stop;
  return data;
}

// --- estimators -------------------------------------------------------------

std::array<ArmSummary, 2> summarize(const AnalysisData& data) {
  std::array<ArmSummary, 2> arms{};
  for (const ObservedRecord& r : data.records) {
    ArmSummary& a = arms.at(static_cast<std::size_t>(r.arm));
    ++a.subjects;
    a.events += r.observed ? 1 : 0;
    a.person_time += r.time;
  }
  return arms;
}

namespace {

struct AttackHat {
  double f0;
  double f1;
};

AttackHat attack_hat(const std::array<ArmSummary, 2>& arms) {
  if (arms[0].subjects == 0 || arms[1].subjects == 0) {
    throw UndefinedEstimandError("an arm has no subjects");
  }
  if (arms[0].events == 0) throw UndefinedEstimandError("no control-arm events");
  return {static_cast<double>(arms[0].events) / static_cast<double>(arms[0].subjects),
          static_cast<double>(arms[1].events) / static_cast<double>(arms[1].subjects)};
}

double nelson_aalen(std::vector<const ObservedRecord*> arm) {
  std::sort(arm.begin(), arm.end(),
            [](const ObservedRecord* a, const ObservedRecord* b) { return a->time < b->time; });
  double cum = 0.0;
  std::size_t at_risk = arm.size();
  std::size_t i = 0;
  while (i < arm.size()) {
    std::size_t j = i;
    std::size_t events = 0;
    while (j < arm.size() && arm[j]->time == arm[i]->time) {
      events += arm[j]->observed ? 1 : 0;
      ++j;
    }
    if (events > 0) cum += static_cast<double>(events) / static_cast<double>(at_risk);
    at_risk -= j - i;
    i = j;
  }
  return cum;
}

// Compensated summation; the Cox score is a difference of large sums.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct RiskSet {
  double d;   // events at this time
  double d1;  // test-arm events at this time
  double r0;
  double r1;
};

std::vector<RiskSet> risk_sets(const AnalysisData& data) {
  std::vector<const ObservedRecord*> order;
  order.reserve(data.records.size());
  for (const auto& r : data.records) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const ObservedRecord* a, const ObservedRecord* b) { return a->time > b->time; });
  std::vector<RiskSet> sets;
  double r0 = 0.0, r1 = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double d = 0.0, d1 = 0.0;
    while (j < order.size() && order[j]->time == order[i]->time) {
      (order[j]->arm == 1 ? r1 : r0) += 1.0;
      if (order[j]->observed) {
        d += 1.0;
        d1 += order[j]->arm == 1 ? 1.0 : 0.0;
      }
      ++j;
    }
    if (d > 0.0) sets.push_back({d, d1, r0, r1});
    i = j;
  }
  return sets;
}

struct CoxTerms {
  double loglik;
  double score;
  double information;
};

CoxTerms cox_terms(const std::vector<RiskSet>& sets, double beta) {
  NeumaierSum loglik, score, info;
  for (const RiskSet& s : sets) {
    // p = r1 e^b / (r0 + r1 e^b), log(r0 + r1 e^b) via a shifted exponent.
    double p, log_denom;
    if (s.r1 == 0.0) {
      p = 0.0;
      log_denom = std::log(s.r0);
    } else if (s.r0 == 0.0) {
      p = 1.0;
      log_denom = std::log(s.r1) + beta;
    } else if (beta > 0.0) {
      const double x = s.r0 * std::exp(-beta);
      p = s.r1 / (s.r1 + x);
      log_denom = beta + std::log(s.r1 + x);
    } else {
      const double x = s.r1 * std::exp(beta);
      p = x / (s.r0 + x);
      log_denom = std::log(s.r0 + x);
    }
    loglik.add(s.d1 * beta);
    loglik.add(-s.d * log_denom);
    score.add(s.d1);
    score.add(-s.d * p);
    info.add(s.d * p * (1.0 - p));
  }
  return {loglik.value(), score.value(), info.value()};
}

}  // namespace

double estimate_ci(const AnalysisData& data) {
  const auto [f0, f1] = attack_hat(summarize(data));
  return 1.0 - f1 / f0;
}

double estimate_ir(const AnalysisData& data) {
  const auto arms = summarize(data);
  attack_hat(arms);
  if (!(arms[1].person_time > 0.0)) throw UndefinedEstimandError("no test-arm person-time");
  const double rate0 = static_cast<double>(arms[0].events) / arms[0].person_time;
  const double rate1 = static_cast<double>(arms[1].events) / arms[1].person_time;
  return 1.0 - rate1 / rate0;
}

double estimate_odds(const AnalysisData& data) {
  const auto [f0, f1] = attack_hat(summarize(data));
  if (f0 >= 1.0 || f1 >= 1.0) throw UndefinedEstimandError("an arm has every subject with an event");
  return 1.0 - (f1 / (1.0 - f1)) / (f0 / (1.0 - f0));
}

double estimate_ch(const AnalysisData& data) {
  std::vector<const ObservedRecord*> arm0, arm1;
  for (const auto& r : data.records) (r.arm == 1 ? arm1 : arm0).push_back(&r);
  const double cum0 = nelson_aalen(std::move(arm0));
  if (!(cum0 > 0.0)) throw UndefinedEstimandError("no control-arm events");
  return 1.0 - nelson_aalen(std::move(arm1)) / cum0;
}

double cox_log_likelihood(const AnalysisData& data, double beta) {
  return cox_terms(risk_sets(data), beta).loglik;
}

CoxFit estimate_cox(const AnalysisData& data) {
  constexpr double score_tol = 1e-10;
  constexpr int max_iter = 100;
  const auto sets = risk_sets(data);
  if (sets.empty()) throw UndefinedEstimandError("Cox fit needs at least one event");

  CoxFit fit;
  // Score limits at beta -> +-inf decide whether a finite maximizer exists.
  double total_d1 = 0.0, at_plus = 0.0, at_minus = 0.0;
  for (const RiskSet& s : sets) {
    total_d1 += s.d1;
    at_plus += s.r1 > 0.0 ? s.d : 0.0;
    at_minus += s.r0 == 0.0 ? s.d : 0.0;
  }
  if (total_d1 - at_plus >= 0.0 || total_d1 - at_minus <= 0.0) {
    fit.monotone = true;
    fit.beta = total_d1 - at_minus <= 0.0 ? -kInfinity : kInfinity;
    fit.theta = std::exp(fit.beta);
    fit.ve = 1.0 - fit.theta;
    return fit;
  }

  double beta = 0.0, lo = -kInfinity, hi = kInfinity;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const CoxTerms cur = cox_terms(sets, beta);
    fit.iterations = iter;
    fit.beta = beta;
    fit.score = cur.score;
    fit.information = cur.information;
    fit.log_likelihood = cur.loglik;
    if (std::abs(cur.score) <= score_tol) {
      fit.converged = true;
      break;
    }
    (cur.score > 0.0 ? lo : hi) = beta;
    double step = cur.information > 0.0 ? cur.score / cur.information
                                        : std::copysign(1.0, cur.score);
    double next = beta + step;
    const double slack = 1e-12 * (1.0 + std::abs(cur.loglik));
    int halvings = 0;
    while (halvings < 60 &&
           (next <= lo || next >= hi || cox_terms(sets, next).loglik < cur.loglik - slack)) {
      step *= 0.5;
      next = beta + step;
      ++halvings;
    }
    if (halvings == 60) {
      if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw SolverFailureError("Cox Newton step failed without a finite bracket");
      }
      next = 0.5 * (lo + hi);
    }
    if (next == beta) {
      // No representable progress; the score is at its rounding floor.
      fit.converged = std::abs(cur.score) <= 1e3 * score_tol;
      break;
    }
    beta = next;
  }
  if (!fit.converged) {
    std::ostringstream msg;
    msg << "Cox fit did not converge after " << fit.iterations << " iterations: beta = "
        << fit.beta << ", score = " << fit.score << ", information = " << fit.information;
    throw SolverFailureError(msg.str());
  }
  fit.theta = std::exp(fit.beta);
  fit.ve = 1.0 - fit.theta;
  return fit;
}

EstimateSet estimate_all(const AnalysisData& data) {
  EstimateSet out;
  out.arms = summarize(data);
  out.realized_tau = data.tau;
  auto guarded = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const UndefinedEstimandError&) {
      return std::nullopt;
    }
  };
  out.ve_ci = guarded([&] { return estimate_ci(data); });
  out.ve_ir = guarded([&] { return estimate_ir(data); });
  out.ve_odds = guarded([&] { return estimate_odds(data); });
  out.ve_ch = guarded([&] { return estimate_ch(data); });
  try {
    out.cox = estimate_cox(data);
    if (!out.cox->monotone) out.ve_cox = out.cox->ve;
  } catch (const UndefinedEstimandError&) {
  }
  return out;
}

// --- consistency ------------------------------------------------------------

std::string to_string(TrialEstimator e) {
  switch (e) {
    case TrialEstimator::ci: return "ci";
    case TrialEstimator::ir: return "ir";
    case TrialEstimator::cox: return "cox";
    case TrialEstimator::ch: return "ch";
    case TrialEstimator::odds: return "odds";
  }
  return "?";
}

std::array<SurvivalModel, 2> population_models(const TrialConfig& config) {
  if (config.frailty.is_degenerate()) return {config.id_model0, config.id_model1};
  return {SurvivalModel::frailty_mixture(config.id_model0, config.frailty),
          SurvivalModel::frailty_mixture(config.id_model1, config.frailty)};
}

namespace {

std::optional<double> pick(const EstimateSet& e, TrialEstimator which) {
  switch (which) {
    case TrialEstimator::ci: return e.ve_ci;
    case TrialEstimator::ir: return e.ve_ir;
    case TrialEstimator::cox: return e.ve_cox;
    case TrialEstimator::ch: return e.ve_ch;
    case TrialEstimator::odds: return e.ve_odds;
  }
  return std::nullopt;
}

Estimand matching_estimand(TrialEstimator which) {
  switch (which) {
    case TrialEstimator::ci: return Estimand::ci;
    case TrialEstimator::ir: return Estimand::ir;
    case TrialEstimator::cox: return Estimand::cox;
    case TrialEstimator::ch: return Estimand::ch;
    case TrialEstimator::odds: return Estimand::odds;
  }
  return Estimand::ci;
}

std::vector<EstimateSet> run_replicates(const TrialConfig& base, std::size_t n,
                                        std::uint64_t row, const SweepOptions& options) {
  std::vector<EstimateSet> results(options.replicates);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t r = next++; r < options.replicates; r = next++) {
      try {
        TrialConfig cfg = base;
        cfg.n = n;
        cfg.seed = numerics::derive_seed(base.seed, (row << 32) | r);
        results[r] = estimate_all(simulate(cfg).analysis());
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(options.replicates)));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace

std::vector<SweepRow> consistency_sweep(const TrialConfig& config_template,
                                        std::span<const std::size_t> n_list,
                                        const SweepOptions& options) {
  config_template.validate();
  if (options.replicates < 2) throw DomainError("consistency sweep needs >= 2 replicates");
  const auto pop = population_models(config_template);

  std::vector<SweepRow> rows;
  for (std::size_t row = 0; row < n_list.size(); ++row) {
    const std::size_t n = n_list[row];
    const auto results = run_replicates(config_template, n, row, options);

    double tau = 0.0;
    if (const auto* ft = std::get_if<FixedTime>(&config_template.stopping)) {
      tau = ft->tau;
    } else {
      for (const auto& e : results) tau += e.realized_tau;
      tau /= static_cast<double>(results.size());
    }
    const Scenario truth(pop[0], pop[1], tau);

    for (TrialEstimator which : kAllTrialEstimators) {
      std::vector<double> values;
      for (const auto& e : results) {
        if (auto v = pick(e, which)) values.push_back(*v);
      }
      SweepRow out{n, which, values.size(), NAN, NAN, evaluate(matching_estimand(which), truth, tau),
                   NAN, NAN};
      if (values.size() >= 2) {
        const double m = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
        double ss = 0.0;
        for (double v : values) ss += (v - m) * (v - m);
        out.mean = m;
        out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        out.se_of_mean = out.sd / std::sqrt(static_cast<double>(values.size()));
        out.bias = m - out.analytic;
      }
      rows.push_back(out);
    }
  }
  return rows;
}

}  // namespace vetk
