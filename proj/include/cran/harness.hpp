// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo campaigns: budget calibration against a target computational
// outage, paired evaluation of every scheduler on identical channel draws,
// and the N_c / lambda sweeps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "cran/complexity.hpp"
#include "cran/mcs.hpp"
#include "cran/netsim.hpp"
#include "cran/rng.hpp"
#include "cran/sched.hpp"

namespace cran {

using LogFn = std::function<void(std::string_view)>;

/// Everything a trial needs, materialized from the configuration.
struct Scenario {
  NetworkLayout layout;
  CellGeometry geometry;
  McsTable table;
  ModelParams model;
  PhyParams phy;
  SwfOptions swf;
};

struct CampaignConfig {
  std::vector<Scheduler> schedulers{Scheduler::Mrs, Scheduler::Swf, Scheduler::Scc, Scheduler::Unconstrained};
  std::size_t n_trials = 100000;
  std::size_t calibration_trials = 100000;
  /// Target computational outage used to calibrate the budget...
  std::optional<double> target_outage = 0.1;
  /// ...or an explicit budget. Exactly one is set.
  std::optional<double> c_server;
  std::uint64_t seed = 1;
  unsigned workers = 1;

  void validate() const {
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    if (schedulers.empty()) throw std::invalid_argument("at least one scheduler is required");
    if (target_outage.has_value() == c_server.has_value())
      throw std::invalid_argument("exactly one of epsilon and c_server must be set");
    if (target_outage && !(*target_outage >= 0.0 && *target_outage < 1.0))
      throw std::invalid_argument("epsilon must be in [0,1)");
    if (c_server && !(*c_server >= 0.0)) throw std::invalid_argument("c_server must be >= 0");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  }
};

struct SchedulerOutcome {
  Scheduler scheduler = Scheduler::Mrs;
  double sum_rate = 0.0;  // zeroed on outage
  double sum_complexity = 0.0;
  bool outage = false;
};

struct TrialOutcome {
  std::uint64_t trial = 0;
  std::size_t n_active = 0;
  double unconstrained_sum_rate = 0.0;
  std::vector<SchedulerOutcome> results;  // in CampaignConfig::schedulers order
};

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;  // P(X <= value)

  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

/// Right-continuous empirical CDF; duplicate samples collapse to one step.
inline std::vector<CdfPoint> empirical_cdf(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical_cdf: no samples");
  std::sort(samples.begin(), samples.end());
  std::vector<CdfPoint> out;
  const auto n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.push_back({samples[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

struct SchedulerSummary {
  Scheduler scheduler = Scheduler::Mrs;
  double mean_sum_rate = 0.0;
  double mean_sum_complexity = 0.0;
  std::size_t outage_count = 0;
  double outage_rate = 0.0;
  /// 1 - mean_sum_rate / unconstrained mean.
  double relative_loss = 0.0;
  std::vector<CdfPoint> cdf_sum_rate;
  std::vector<CdfPoint> cdf_sum_complexity;
};

struct CampaignResult {
  double c_server = 0.0;
  std::size_t n_trials = 0;
  double unconstrained_mean_sum_rate = 0.0;
  double mean_active = 0.0;
  std::vector<TrialOutcome> trials;
  std::vector<SchedulerSummary> summaries;

  const SchedulerSummary& summary(Scheduler s) const {
    for (const auto& x : summaries)
      if (x.scheduler == s) return x;
    throw std::out_of_range("scheduler not part of this campaign: " + std::string(scheduler_name(s)));
  }
};

// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) over `workers` threads in contiguous blocks.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * block, hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// One UE per occupied centralized cell; user_id is the cell's rank.
inline std::vector<UserChannel> trial_users(const TrialDraw& draw, const PhyParams& phy) {
  std::vector<UserChannel> users;
  for (std::size_t k = 0; k < draw.cells.size(); ++k)
    if (draw.cells[k]) users.push_back({static_cast<std::uint32_t>(k), uplink_sinr(draw, phy, k)});
  return users;
}

inline std::uint64_t trial_seed(std::uint64_t master, Stream stream, std::uint64_t trial) {
  return derive_seed(master, stream, trial);
}

/// Runs every scheduler on one draw and scores it against the budget.
inline TrialOutcome evaluate_trial(const Scenario& sc, const TrialDraw& draw, std::span<const Scheduler> schedulers,
                                   double budget) {
  TrialOutcome out;
  const auto users = trial_users(draw, sc.phy);
  out.n_active = users.size();
  std::optional<RateAllocation> max_rate;
  auto get_max_rate = [&]() -> const RateAllocation& {
    if (!max_rate) max_rate = mrs(users, sc.table, sc.model);
    return *max_rate;
  };
  for (auto s : schedulers) {
    SchedulerOutcome r;
    r.scheduler = s;
    switch (s) {
      case Scheduler::Mrs: {
        const auto& a = get_max_rate();
        r.sum_complexity = a.sum_complexity;
        r.outage = a.sum_complexity > budget;
        r.sum_rate = r.outage ? 0.0 : a.sum_rate;
        break;
      }
      case Scheduler::Unconstrained: {
        const auto& a = get_max_rate();
        r.sum_complexity = a.sum_complexity;
        r.sum_rate = a.sum_rate;
        break;
      }
      case Scheduler::Swf:
      case Scheduler::Scc: {
        const auto a = s == Scheduler::Swf ? swf_discrete(users, sc.table, sc.model, budget, sc.swf)
                                           : scc(users, sc.table, sc.model, budget);
        r.sum_complexity = a.sum_complexity;
        r.outage = a.sum_complexity > budget;
        if (r.outage)
          throw std::logic_error(std::string(scheduler_name(s)) + " exceeded the complexity budget");
        r.sum_rate = a.sum_rate;
        break;
      }
    }
    out.results.push_back(r);
  }
  out.unconstrained_sum_rate = get_max_rate().sum_rate;
  return out;
}

/// Sum-complexity of the max-rate allocation over n trials of a stream.
inline std::vector<double> max_rate_complexity_samples(const Scenario& sc, std::size_t n, std::uint64_t master,
                                                       Stream stream, unsigned workers) {
  std::vector<double> samples(n);
  parallel_for(n, workers, [&](std::size_t t) {
    const auto draw = draw_trial(sc.layout, sc.geometry, sc.phy, trial_seed(master, stream, t));
    samples[t] = mrs(trial_users(draw, sc.phy), sc.table, sc.model).sum_complexity;
  });
  return samples;
}

/// Smallest sample c such that at most a fraction eps of the samples
/// strictly exceed c.
inline double calibrate_budget(std::vector<double> samples, double eps, const LogFn& log = {}) {
  if (samples.empty()) throw std::invalid_argument("calibrate_budget: no samples");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("calibrate_budget: epsilon must be in [0,1)");
  if (eps == 0.0 && log)
    log("warning: epsilon = 0 calibrates to the sample maximum; zero outage is not guaranteed on new draws");
  const std::size_t n = samples.size();
  auto allowed = static_cast<std::size_t>(std::floor(eps * static_cast<double>(n) + 1e-9));
  allowed = std::min(allowed, n - 1);
  const auto pos = samples.begin() + static_cast<std::ptrdiff_t>(n - 1 - allowed);
  std::nth_element(samples.begin(), pos, samples.end());
  return *pos;
}

/// Calibrates on the calibration stream, independent of evaluation draws.
inline double calibrate_budget(const Scenario& sc, const CampaignConfig& cfg, std::size_t calibration_trials,
                               const LogFn& log = {}) {
  if (!cfg.target_outage) throw std::invalid_argument("calibrate_budget: no target outage configured");
  if (calibration_trials < 1000) throw std::invalid_argument("calibrate_budget: need at least 1000 trials");
  auto samples = max_rate_complexity_samples(sc, calibration_trials, cfg.seed, Stream::Calibration, cfg.workers);
  return calibrate_budget(std::move(samples), *cfg.target_outage, log);
}

inline double resolve_budget(const Scenario& sc, const CampaignConfig& cfg, const LogFn& log = {}) {
  if (cfg.c_server) return *cfg.c_server;
  return calibrate_budget(sc, cfg, cfg.calibration_trials, log);
}

inline CampaignResult run_campaign(const Scenario& sc, const CampaignConfig& cfg, double budget) {
  cfg.validate();
  CampaignResult res;
  res.c_server = budget;
  res.n_trials = cfg.n_trials;
  res.trials.resize(cfg.n_trials);
  parallel_for(cfg.n_trials, cfg.workers, [&](std::size_t t) {
    const auto draw = draw_trial(sc.layout, sc.geometry, sc.phy, trial_seed(cfg.seed, Stream::Evaluation, t));
    res.trials[t] = evaluate_trial(sc, draw, cfg.schedulers, budget);
    res.trials[t].trial = t;
  });

  const auto n = static_cast<double>(cfg.n_trials);
  double unc = 0.0, active = 0.0;
  for (std::size_t t = 0; t < cfg.n_trials; ++t) {
    unc += res.trials[t].unconstrained_sum_rate;
    active += static_cast<double>(res.trials[t].n_active);
  }
  res.unconstrained_mean_sum_rate = unc / n;
  res.mean_active = active / n;

  for (std::size_t j = 0; j < cfg.schedulers.size(); ++j) {
    SchedulerSummary s;
    s.scheduler = cfg.schedulers[j];
    std::vector<double> rates(cfg.n_trials), comps(cfg.n_trials);
    double rate_sum = 0.0, comp_sum = 0.0;
    for (std::size_t t = 0; t < cfg.n_trials; ++t) {
      const auto& o = res.trials[t].results[j];
      rates[t] = o.sum_rate;
      comps[t] = o.sum_complexity;
      rate_sum += o.sum_rate;
      comp_sum += o.sum_complexity;
      s.outage_count += o.outage ? 1 : 0;
    }
    s.mean_sum_rate = rate_sum / n;
    s.mean_sum_complexity = comp_sum / n;
    s.outage_rate = static_cast<double>(s.outage_count) / n;
    s.relative_loss = res.unconstrained_mean_sum_rate > 0.0 ? 1.0 - s.mean_sum_rate / res.unconstrained_mean_sum_rate
                                                            : 0.0;
    s.cdf_sum_rate = empirical_cdf(std::move(rates));
    s.cdf_sum_complexity = empirical_cdf(std::move(comps));
    res.summaries.push_back(std::move(s));
  }
  return res;
}

inline CampaignResult run_campaign(const Scenario& sc, const CampaignConfig& cfg, const LogFn& log = {}) {
  return run_campaign(sc, cfg, resolve_budget(sc, cfg, log));
}

struct SweepPoint {
  double x = 0.0;  // N_c or lambda
  CampaignResult result;
};

/// One campaign per N_c, each on the N_c most central cells with its own
/// calibrated budget.
inline std::vector<SweepPoint> sweep_nc(const Scenario& sc, const CampaignConfig& cfg,
                                        std::span<const std::size_t> nc_values, const LogFn& log = {}) {
  std::vector<SweepPoint> out;
  for (auto nc : nc_values) {
    Scenario point = sc;
    point.layout = with_centralized(sc.layout, nc);
    if (log) log("sweep-nc: N_c = " + std::to_string(nc));
    out.push_back({static_cast<double>(nc), run_campaign(point, cfg, log)});
  }
  return out;
}

/// Budget calibrated once at reference_lambda, then held fixed across the
/// lambda values.
inline std::vector<SweepPoint> sweep_lambda(const Scenario& sc, const CampaignConfig& cfg,
                                            std::span<const double> lambda_values, double reference_lambda,
                                            const LogFn& log = {}) {
  Scenario ref = sc;
  ref.phy.lambda_density = reference_lambda;
  ref.phy.validate();
  const double budget = resolve_budget(ref, cfg, log);
  std::vector<SweepPoint> out;
  for (auto lambda : lambda_values) {
    Scenario point = sc;
    point.phy.lambda_density = lambda;
    point.phy.validate();
    if (log) log("sweep-lambda: lambda = " + text::format_double(lambda));
    out.push_back({lambda, run_campaign(point, cfg, budget)});
  }
  return out;
}

}  // namespace cran
