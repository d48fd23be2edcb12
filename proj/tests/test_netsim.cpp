// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "cran/netsim.hpp"
#include "oracle_values.hpp"

namespace {

using namespace cran;
namespace ov = cran::oracle;

const Rect kArena{0.0, 0.0, 30.0, 30.0};

NetworkLayout single_bs() {
  NetworkLayout l;
  l.bs_ids = {0};
  l.bs_positions = {{15.0, 15.0}};
  l.arena = kArena;
  l.centralized = {0};
  return l;
}

NetworkLayout symmetric_pair() {
  NetworkLayout l;
  l.bs_ids = {0, 1};
  l.bs_positions = {{10.0, 15.0}, {20.0, 15.0}};
  l.arena = kArena;
  l.centralized = {0, 1};
  return l;
}

ActiveUe ue_at(Point p, Point bs, std::size_t n_cells) {
  ActiveUe u;
  u.position = p;
  u.serving_distance = std::max(kMinDistanceKm, distance(p, bs));
  u.gains.assign(n_cells, 1.0);
  return u;
}

// ---------------------------------------------------------------------------
// layouts

TEST(ParseLayout, ThreeStations) {
  const auto l = parse_layout("centralized: 0,1,2\n0,0,0\n1,10,0\n2,5,8.66\n");
  EXPECT_EQ(l.size(), 3u);
  EXPECT_EQ(l.centralized.size(), 3u);
  EXPECT_EQ(l.bs_positions[2], (Point{5.0, 8.66}));
  EXPECT_TRUE(l.arena.contains({0, 0}));
  EXPECT_TRUE(l.arena.contains({10, 8.66}));
}

TEST(ParseLayout, ExplicitArenaAndComments) {
  const auto l = parse_layout("# demo\narena: 0,0,30,30\ncentralized: 5  # one\n5, 15, 15\n7, 1, 2\n");
  EXPECT_EQ(l.arena, kArena);
  ASSERT_EQ(l.centralized.size(), 1u);
  EXPECT_EQ(l.bs_ids[l.centralized[0]], 5);
}

TEST(ParseLayout, Errors) {
  EXPECT_THROW(parse_layout("centralized: 7\n0,0,0\n1,10,0\n2,5,8.66\n"), std::invalid_argument);
  EXPECT_THROW(parse_layout(""), std::invalid_argument);
  EXPECT_THROW(parse_layout("0,0,0\n"), std::invalid_argument);
  EXPECT_THROW(parse_layout("centralized: 0\n0,0,0\n0,1,1\n"), std::invalid_argument);
  EXPECT_THROW(parse_layout("centralized: 0\n0,0\n"), std::invalid_argument);
  EXPECT_THROW(parse_layout("centralized: 0\nbogus: 1\n0,0,0\n"), std::invalid_argument);
  EXPECT_THROW(parse_layout("arena: 0,0,1,1\ncentralized: 0\n0,5,5\n"), std::invalid_argument);
}

TEST(ParseLayout, FormatRoundTrip) {
  const auto l = generate_layout(LayoutKind::UniformRandom, 20, kArena, 4, 11);
  const auto back = parse_layout(format_layout(l));
  EXPECT_EQ(back.bs_positions, l.bs_positions);
  EXPECT_EQ(back.bs_ids, l.bs_ids);
  EXPECT_EQ(back.centralized, l.centralized);
  EXPECT_EQ(back.arena, l.arena);
}

TEST(LoadLayout, MissingFileNamesPath) {
  try {
    load_layout("/nonexistent/layout.txt");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/layout.txt"), std::string::npos);
  }
}

TEST(GenerateLayout, UniformRandomDefaults) {
  const auto l = generate_layout(LayoutKind::UniformRandom, 129, kArena, 10, 42);
  EXPECT_EQ(l.size(), 129u);
  EXPECT_EQ(l.centralized.size(), 10u);
  for (const auto& p : l.bs_positions) EXPECT_TRUE(kArena.contains(p));
  // The centralized set is the 10 most central stations.
  const auto order = centrality_order(l);
  std::vector<std::size_t> first(order.begin(), order.begin() + 10);
  EXPECT_EQ(l.centralized, first);
}

TEST(GenerateLayout, HexCenterIsCentralized) {
  const auto l = generate_layout(LayoutKind::HexGrid, 9, Rect{0, 0, 3, 3}, 1, 0);
  ASSERT_EQ(l.centralized.size(), 1u);
  const auto& p = l.bs_positions[l.centralized[0]];
  EXPECT_NEAR(p.y, 1.5, 1e-12);
  EXPECT_LT(distance(p, {1.5, 1.5}), 0.5);
}

TEST(GenerateLayout, Errors) {
  EXPECT_THROW(generate_layout(LayoutKind::UniformRandom, 5, kArena, 6, 1), std::invalid_argument);
  EXPECT_THROW(generate_layout(LayoutKind::HexGrid, 0, kArena, 1, 1), std::invalid_argument);
  EXPECT_THROW(generate_layout(LayoutKind::HexGrid, 5, kArena, 0, 1), std::invalid_argument);
}

TEST(WithCentralized, KeepsMostCentral) {
  const auto l = generate_layout(LayoutKind::UniformRandom, 129, kArena, 10, 42);
  const auto l4 = with_centralized(l, 4);
  EXPECT_EQ(l4.centralized, std::vector<std::size_t>(l.centralized.begin(), l.centralized.begin() + 4));
  EXPECT_THROW(with_centralized(l, 11), std::invalid_argument);
  EXPECT_THROW(with_centralized(l, 0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// cell areas

TEST(CellAreas, SingleStation) {
  const auto g = estimate_cell_areas(single_bs(), 100000, 1);
  EXPECT_EQ(g.areas[0], 900.0);
}

TEST(CellAreas, SymmetricPair) {
  const auto g = estimate_cell_areas(symmetric_pair(), 100000, 2);
  EXPECT_NEAR(g.areas[0] / g.areas[1], 1.0, 0.02);
}

TEST(CellAreas, PartitionOfArena) {
  const auto l = generate_layout(LayoutKind::UniformRandom, 129, kArena, 10, 42);
  const auto g = estimate_cell_areas(l, 200000, 3);
  double sum = 0.0;
  for (double a : g.areas) {
    EXPECT_GE(a, 0.0);
    sum += a;
  }
  EXPECT_NEAR(sum, 900.0, 1e-9);
}

TEST(CellAreas, SamplesLieInOwnCell) {
  const auto l = generate_layout(LayoutKind::UniformRandom, 30, kArena, 5, 8);
  const auto g = estimate_cell_areas(l, 20000, 4);
  for (std::size_t i = 0; i < l.size(); ++i)
    for (const auto& p : g.samples[i]) ASSERT_EQ(nearest_bs(l, p), i);
}

TEST(CellAreas, TooFewSamples) { EXPECT_THROW(estimate_cell_areas(single_bs(), 100, 1), std::invalid_argument); }

// ---------------------------------------------------------------------------
// SINR

TEST(UplinkSinr, UnitDistance) {
  TrialDraw d;
  d.bs = {{0, 0}};
  d.cells = {ue_at({1, 0}, {0, 0}, 1)};
  EXPECT_NEAR(uplink_sinr(d, PhyParams{}, 0), 100.0, 1e-12);
}

TEST(UplinkSinr, TwoKilometres) {
  TrialDraw d;
  d.bs = {{0, 0}};
  d.cells = {ue_at({2, 0}, {0, 0}, 1)};
  const double g = uplink_sinr(d, PhyParams{}, 0);
  EXPECT_NEAR(g, ov::kUplinkSinr_d2, 1e-12 * ov::kUplinkSinr_d2);
}

TEST(UplinkSinr, SymmetricPair) {
  TrialDraw d;
  d.bs = {{-1, 0}, {1, 0}};
  d.cells = {ue_at({-1.5, 0}, {-1, 0}, 2), ue_at({1.5, 0}, {1, 0}, 2)};
  const PhyParams phy{};
  const double g0 = uplink_sinr(d, phy, 0), g1 = uplink_sinr(d, phy, 1);
  EXPECT_EQ(g0, g1);
  // interference lowers SINR below the isolated value
  TrialDraw alone = d;
  alone.cells[1].reset();
  EXPECT_LT(g0, uplink_sinr(alone, phy, 0));
}

TEST(UplinkSinr, ClampsDistance) {
  TrialDraw a, b;
  a.bs = b.bs = {{0, 0}};
  a.cells = {ue_at({0.001, 0}, {0, 0}, 1)};
  b.cells = {ue_at({0.01, 0}, {0, 0}, 1)};
  EXPECT_EQ(uplink_sinr(a, PhyParams{}, 0), uplink_sinr(b, PhyParams{}, 0));
}

TEST(UplinkSinr, EmptyCellRejected) {
  TrialDraw d;
  d.bs = {{0, 0}};
  d.cells = {std::nullopt};
  EXPECT_THROW(uplink_sinr(d, PhyParams{}, 0), std::invalid_argument);
}

TEST(PhyParams, Validation) {
  PhyParams p;
  EXPECT_NO_THROW(p.validate());
  p.s = 1.5;
  try {
    p.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "s must be in [0,1]");
  }
  p = PhyParams{};
  p.pathloss_exponent = 2.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// trial statistics

class TrialStatistics : public ::testing::Test {
 protected:
  NetworkLayout layout = generate_layout(LayoutKind::UniformRandom, 129, kArena, 10, 42);
  CellGeometry geometry = estimate_cell_areas(layout, 200000, 5);
};

TEST_F(TrialStatistics, MeanFadingGainIsOne) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::uint64_t t = 0; n < 1000000; ++t) {
    const auto d = draw_trial(layout, geometry, PhyParams{}, derive_seed(1, Stream::Evaluation, t));
    for (const auto& c : d.cells)
      if (c)
        for (double h : c->gains) {
          EXPECT_GT(h, 0.0);
          sum += h;
          ++n;
        }
  }
  EXPECT_NEAR(sum / static_cast<double>(n), 1.0, 0.005);
}

TEST_F(TrialStatistics, OccupancyMatchesDensity) {
  PhyParams phy;
  phy.lambda_density = 0.02;  // keeps occupancy away from 1
  const std::size_t n = 100000;
  std::vector<std::size_t> hits(layout.centralized.size(), 0);
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto d = draw_trial(layout, geometry, phy, derive_seed(2, Stream::Evaluation, t));
    for (std::size_t k = 0; k < d.cells.size(); ++k) hits[k] += d.cells[k].has_value();
  }
  for (std::size_t k = 0; k < hits.size(); ++k) {
    const double p = 1.0 - std::exp(-phy.lambda_density * geometry.areas[layout.centralized[k]]);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    EXPECT_NEAR(static_cast<double>(hits[k]) / static_cast<double>(n), p, 3.0 * sigma) << "cell " << k;
  }
}

TEST_F(TrialStatistics, LambdaLimits) {
  PhyParams low;
  low.lambda_density = 1e-12;
  PhyParams high;
  high.lambda_density = 1e6;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    EXPECT_EQ(draw_trial(layout, geometry, low, t).n_active(), 0u);
    EXPECT_EQ(draw_trial(layout, geometry, high, t).n_active(), layout.centralized.size());
  }
}

TEST_F(TrialStatistics, ScaleConsistentSinr) {
  PhyParams a, b;
  b.p0 = a.p0 * 7.5;
  b.noise_w = a.noise_w * 7.5;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    const auto d = draw_trial(layout, geometry, a, t);
    for (std::size_t k = 0; k < d.cells.size(); ++k) {
      if (!d.cells[k]) continue;
      const double ga = uplink_sinr(d, a, k), gb = uplink_sinr(d, b, k);
      EXPECT_NEAR(gb, ga, 1e-12 * ga);
    }
  }
}

TEST_F(TrialStatistics, Deterministic) {
  PhyParams phy;
  phy.background_interference = true;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto d1 = draw_trial(layout, geometry, phy, t * 31 + 5);
    const auto d2 = draw_trial(layout, geometry, phy, t * 31 + 5);
    ASSERT_EQ(d1, d2);
    for (std::size_t k = 0; k < d1.cells.size(); ++k)
      if (d1.cells[k]) {
        EXPECT_EQ(uplink_sinr(d1, phy, k), uplink_sinr(d2, phy, k));
      }
  }
}

TEST_F(TrialStatistics, UeServedByNearestStation) {
  for (std::uint64_t t = 0; t < 2000; ++t) {
    const auto d = draw_trial(layout, geometry, PhyParams{}, t);
    for (std::size_t k = 0; k < d.cells.size(); ++k)
      if (d.cells[k]) {
        ASSERT_EQ(nearest_bs(layout, d.cells[k]->position), layout.centralized[k]);
      }
  }
}

TEST_F(TrialStatistics, BackgroundInterferenceLowersSinr) {
  PhyParams with_bg;
  with_bg.background_interference = true;
  std::size_t compared = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    const auto d = draw_trial(layout, geometry, with_bg, t);
    if (d.background.empty()) continue;
    TrialDraw bare = d;
    bare.background.clear();
    for (std::size_t k = 0; k < d.cells.size(); ++k) {
      if (!d.cells[k]) continue;
      EXPECT_LT(uplink_sinr(d, with_bg, k), uplink_sinr(bare, with_bg, k));
      ++compared;
    }
  }
  EXPECT_GT(compared, 0u);
}

}  // namespace
