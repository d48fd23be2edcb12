// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cran/harness.hpp"

namespace {

using namespace cran;

Scenario small_scenario(std::size_t n_c = 10) {
  Scenario sc;
  sc.layout = generate_layout(LayoutKind::UniformRandom, 129, Rect{0, 0, 30, 30}, n_c, 42);
  sc.geometry = estimate_cell_areas(sc.layout, 50000, derive_seed(42, Stream::Geometry, 0));
  sc.table = default_table(sc.model);
  return sc;
}

CampaignConfig small_campaign(std::size_t n = 3000) {
  CampaignConfig c;
  c.n_trials = n;
  c.calibration_trials = 3000;
  c.target_outage = 0.1;
  return c;
}

TEST(CalibrateBudget, Examples) {
  std::vector<double> ten{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(calibrate_budget(ten, 0.1), 9.0);
  EXPECT_EQ(calibrate_budget(ten, 0.25), 8.0);
  EXPECT_EQ(calibrate_budget({5, 5, 5}, 0.1), 5.0);
  EXPECT_EQ(calibrate_budget({5, 5, 5}, 0.9), 5.0);
}

TEST(CalibrateBudget, ZeroEpsilonReturnsMaxWithWarning) {
  std::string logged;
  EXPECT_EQ(calibrate_budget({3, 1, 2}, 0.0, [&](std::string_view m) { logged = m; }), 3.0);
  EXPECT_NE(logged.find("warning"), std::string::npos);
}

TEST(CalibrateBudget, Errors) {
  EXPECT_THROW(calibrate_budget(std::vector<double>{}, 0.1), std::invalid_argument);
  EXPECT_THROW(calibrate_budget({1.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(calibrate_budget({1.0}, -0.1), std::invalid_argument);
}

TEST(CalibrateBudget, OutageFractionBound) {
  std::vector<double> s;
  for (int i = 0; i < 997; ++i) s.push_back(std::sin(i * 0.37) * 10.0 + i * 0.01);
  for (double eps : {0.0, 0.001, 0.01, 0.05, 0.1, 0.33}) {
    const double c = calibrate_budget(s, eps);
    const auto above = std::count_if(s.begin(), s.end(), [&](double x) { return x > c; });
    EXPECT_LE(static_cast<double>(above) / s.size(), eps + 1e-12);
    // smallest such value: the next sample down would exceed the allowance
    std::vector<double> below;
    for (double x : s)
      if (x < c) below.push_back(x);
    if (!below.empty()) {
      const double c2 = *std::max_element(below.begin(), below.end());
      const auto above2 = std::count_if(s.begin(), s.end(), [&](double x) { return x > c2; });
      EXPECT_GT(static_cast<double>(above2) / s.size(), eps);
    }
  }
}

TEST(EmpiricalCdf, Examples) {
  EXPECT_EQ(empirical_cdf({1, 2, 3}), (std::vector<CdfPoint>{{1, 1.0 / 3}, {2, 2.0 / 3}, {3, 1.0}}));
  EXPECT_EQ(empirical_cdf({5, 5}), (std::vector<CdfPoint>{{5, 1.0}}));
  EXPECT_THROW(empirical_cdf({}), std::invalid_argument);
}

class CampaignTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    sc_ = new Scenario(small_scenario());
    res_ = new CampaignResult(run_campaign(*sc_, small_campaign()));
  }
  static void TearDownTestSuite() {
    delete res_;
    delete sc_;
  }
  static Scenario* sc_;
  static CampaignResult* res_;
};
Scenario* CampaignTest::sc_ = nullptr;
CampaignResult* CampaignTest::res_ = nullptr;

TEST_F(CampaignTest, SwfSccNeverInOutage) {
  EXPECT_EQ(res_->summary(Scheduler::Swf).outage_count, 0u);
  EXPECT_EQ(res_->summary(Scheduler::Scc).outage_count, 0u);
  for (const auto& t : res_->trials)
    for (const auto& o : t.results)
      if (o.scheduler == Scheduler::Swf || o.scheduler == Scheduler::Scc) {
        EXPECT_LE(o.sum_complexity, res_->c_server);
      }
}

TEST_F(CampaignTest, UnconstrainedIsMaxRateWithoutZeroing) {
  const auto& u = res_->summary(Scheduler::Unconstrained);
  EXPECT_EQ(u.outage_count, 0u);
  EXPECT_DOUBLE_EQ(u.mean_sum_rate, res_->unconstrained_mean_sum_rate);
  for (const auto& t : res_->trials) {
    const auto& mrs_o = t.results[0];
    const auto& unc = t.results[3];
    ASSERT_EQ(mrs_o.scheduler, Scheduler::Mrs);
    ASSERT_EQ(unc.scheduler, Scheduler::Unconstrained);
    EXPECT_EQ(unc.sum_rate, t.unconstrained_sum_rate);
    EXPECT_EQ(mrs_o.sum_complexity, unc.sum_complexity);
    if (mrs_o.outage) {
      EXPECT_EQ(mrs_o.sum_rate, 0.0);
      EXPECT_GT(mrs_o.sum_complexity, res_->c_server);
    } else {
      EXPECT_EQ(mrs_o.sum_rate, unc.sum_rate);
    }
  }
}

TEST_F(CampaignTest, PerTrialOrdering) {
  for (const auto& t : res_->trials) {
    const double unc = t.unconstrained_sum_rate;
    for (const auto& o : t.results) {
      EXPECT_LE(o.sum_rate, unc + 1e-12);
      if ((o.scheduler == Scheduler::Swf || o.scheduler == Scheduler::Scc) &&
          t.results[3].sum_complexity > res_->c_server) {
        EXPECT_LE(o.sum_complexity, t.results[3].sum_complexity);
      }
    }
  }
}

TEST_F(CampaignTest, SummariesWellFormed) {
  for (const auto& s : res_->summaries) {
    EXPECT_GE(s.outage_rate, 0.0);
    EXPECT_LE(s.outage_rate, 1.0);
    ASSERT_FALSE(s.cdf_sum_rate.empty());
    EXPECT_DOUBLE_EQ(s.cdf_sum_rate.back().fraction, 1.0);
    for (std::size_t i = 1; i < s.cdf_sum_rate.size(); ++i) {
      EXPECT_GT(s.cdf_sum_rate[i].value, s.cdf_sum_rate[i - 1].value);
      EXPECT_GT(s.cdf_sum_rate[i].fraction, s.cdf_sum_rate[i - 1].fraction);
    }
  }
}

TEST_F(CampaignTest, PairedDraws) {
  // Every scheduler in a trial saw the same users.
  for (std::size_t t = 0; t < 50; ++t) {
    const auto draw = draw_trial(sc_->layout, sc_->geometry, sc_->phy, trial_seed(1, Stream::Evaluation, t));
    EXPECT_EQ(draw.n_active(), res_->trials[t].n_active);
    const auto m = mrs(trial_users(draw, sc_->phy), sc_->table, sc_->model);
    EXPECT_EQ(m.sum_rate, res_->trials[t].unconstrained_sum_rate);
  }
}

TEST(Campaign, MrsBudgetAboveCalibrationMax) {
  const auto sc = small_scenario();
  auto cfg = small_campaign(1000);
  const auto samples = max_rate_complexity_samples(sc, 1000, cfg.seed, Stream::Evaluation, 1);
  const double budget = *std::max_element(samples.begin(), samples.end()) + 1.0;
  const auto res = run_campaign(sc, cfg, budget);
  EXPECT_EQ(res.summary(Scheduler::Mrs).outage_count, 0u);
}

TEST(Campaign, ReproducibleAcrossWorkerCounts) {
  const auto sc = small_scenario();
  auto cfg = small_campaign(2000);
  const auto a = run_campaign(sc, cfg);
  cfg.workers = 4;
  const auto b = run_campaign(sc, cfg);
  ASSERT_EQ(a.c_server, b.c_server);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t t = 0; t < a.trials.size(); ++t) {
    ASSERT_EQ(a.trials[t].n_active, b.trials[t].n_active);
    for (std::size_t j = 0; j < a.trials[t].results.size(); ++j) {
      EXPECT_EQ(a.trials[t].results[j].sum_rate, b.trials[t].results[j].sum_rate);
      EXPECT_EQ(a.trials[t].results[j].sum_complexity, b.trials[t].results[j].sum_complexity);
    }
  }
}

TEST(Campaign, ExplicitBudget) {
  const auto sc = small_scenario();
  auto cfg = small_campaign(500);
  cfg.target_outage.reset();
  cfg.c_server = 3.5;
  EXPECT_EQ(run_campaign(sc, cfg).c_server, 3.5);
  cfg.target_outage = 0.1;
  EXPECT_THROW(run_campaign(sc, cfg), std::invalid_argument);
}

TEST(SweepNc, SingleCellIsSingleCellRate) {
  const auto sc = small_scenario();
  auto cfg = small_campaign(2000);
  const std::vector<std::size_t> nc{1, 3};
  const auto pts = sweep_nc(sc, cfg, nc);
  ASSERT_EQ(pts.size(), 2u);
  const auto one = with_centralized(sc.layout, 1);
  double mean = 0.0;
  for (std::size_t t = 0; t < cfg.n_trials; ++t) {
    const auto d = draw_trial(one, sc.geometry, sc.phy, trial_seed(cfg.seed, Stream::Evaluation, t));
    if (d.cells[0]) mean += sc.table.rate(feasible_index(sc.table, uplink_sinr(d, sc.phy, 0)));
  }
  mean /= static_cast<double>(cfg.n_trials);
  EXPECT_DOUBLE_EQ(pts[0].result.unconstrained_mean_sum_rate, mean);
  for (const auto& t : pts[0].result.trials) EXPECT_LE(t.n_active, 1u);
  EXPECT_THROW(sweep_nc(sc, cfg, std::vector<std::size_t>{11}), std::invalid_argument);
}

TEST(SweepLambda, FixedBudgetAcrossPoints) {
  const auto sc = small_scenario();
  auto cfg = small_campaign(2000);
  const std::vector<double> lambdas{0.5, 4.0};
  const auto pts = sweep_lambda(sc, cfg, lambdas, 0.5);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].result.c_server, pts[1].result.c_server);
  EXPECT_GT(pts[1].result.summary(Scheduler::Mrs).outage_rate, pts[0].result.summary(Scheduler::Mrs).outage_rate);
  EXPECT_GT(pts[1].result.mean_active, pts[0].result.mean_active);
}

TEST(ParallelFor, CoversRangeAndPropagatesErrors) {
  std::vector<int> hit(1001, 0);
  parallel_for(hit.size(), 7, [&](std::size_t i) { hit[i] += 1; });
  EXPECT_TRUE(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 5) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

}  // namespace
