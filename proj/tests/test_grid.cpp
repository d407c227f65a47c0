// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>

#include "pcq/errors.hpp"
#include "pcq/grid.hpp"
#include "pcq/parallel.hpp"
#include "pcq/synth.hpp"
#include "support/oracle.hpp"

namespace pcq {
namespace {

TEST(Profiles, Builtins) {
  const auto l1 = lidar1_profile();
  EXPECT_EQ(l1.name, "lidar1");
  EXPECT_TRUE(l1.full_circle());
  EXPECT_DOUBLE_EQ(l1.elevation_span(), 40.0);
  EXPECT_EQ(GridConfig::for_profile(l1).cell_count(), 8u * 32u);
  const auto l2 = lidar2_profile();
  EXPECT_FALSE(l2.full_circle());
  EXPECT_DOUBLE_EQ(l2.azimuth_span(), 120.0);
  EXPECT_DOUBLE_EQ(l2.elevation_span(), 25.0);
  EXPECT_EQ(GridConfig::for_profile(l2).cell_count(), 8u * 16u);
  EXPECT_THROW(builtin_profile("lidar3"), ConfigError);
}

TEST(GridConfig, Parse) {
  const auto g = parse_grid("8x32");
  EXPECT_EQ(g.rows, 8u);
  EXPECT_EQ(g.cols, 32u);
  EXPECT_THROW(parse_grid("8"), ConfigError);
  EXPECT_THROW(parse_grid("0x4"), ConfigError);
  EXPECT_THROW(parse_grid("4x"), ConfigError);
  EXPECT_THROW(parse_grid("ax4"), ConfigError);
}

TEST(Projection, EmptyFrame) {
  const auto grid = project_frame({}, lidar1_profile(), {8, 32});
  EXPECT_EQ(grid.point_count(), 0u);
  EXPECT_EQ(grid.dropped_invalid(), 0u);
  EXPECT_EQ(grid.non_empty_cells(), 0u);
}

TEST(Projection, CornersAndEdges) {
  const auto prof = lidar2_profile();
  const GridConfig cfg{8, 16};
  EXPECT_EQ(locate_cell(-60.0, -12.5, prof, cfg).row, 0u);
  EXPECT_EQ(locate_cell(-60.0, -12.5, prof, cfg).col, 0u);
  // Last cell is closed on top.
  EXPECT_EQ(locate_cell(0.0, 12.5, prof, cfg).row, 7u);
  // Half-open: a lower bin edge belongs to the upper cell.
  EXPECT_EQ(locate_cell(-60.0 + 7.5, 0.0, prof, cfg).col, 1u);
  // Out of view: nearest edge.
  EXPECT_EQ(locate_cell(70.0, 0.0, prof, cfg).col, 15u);
  EXPECT_EQ(locate_cell(-80.0, 0.0, prof, cfg).col, 0u);
  EXPECT_EQ(locate_cell(0.0, 40.0, prof, cfg).row, 7u);
  EXPECT_EQ(locate_cell(0.0, -40.0, prof, cfg).row, 0u);

  const auto l1 = lidar1_profile();
  EXPECT_EQ(locate_cell(359.999, 0.0, l1, {8, 32}).col, 31u);
  EXPECT_EQ(locate_cell(0.0, 0.0, l1, {8, 32}).col, 0u);
}

TEST(Projection, ConservationAndSentinels) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto prof = seed % 2 ? lidar1_profile() : lidar2_profile();
    const auto pts = oracle::random_frame(seed, 3000, prof);
    const auto grid = project_frame(pts, prof, GridConfig::for_profile(prof));
    EXPECT_EQ(grid.point_count() + grid.dropped_invalid(), pts.size());
    const auto want = oracle::bin(pts, prof, GridConfig::for_profile(prof).rows,
                                  GridConfig::for_profile(prof).cols);
    for (std::size_t c = 0; c < want.size(); ++c) {
      ASSERT_EQ(grid.cell(c).size(), want[c].size()) << "seed " << seed << " cell " << c;
    }
  }
}

TEST(Projection, UniformPointsPassChiSquare) {
  const auto prof = lidar2_profile();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> az(-60.0, 60.0), el(-12.5, 12.5);
  std::vector<PolarPoint> pts;
  for (int i = 0; i < 10000; ++i) pts.emplace_back(10.0, az(rng), el(rng), 0.3);
  const GridConfig cfg{8, 16};
  const auto grid = project_frame(pts, prof, cfg);
  const auto recount = oracle::bin(pts, prof, cfg.rows, cfg.cols);

  std::size_t total = 0;
  double chi2 = 0.0;
  const double expected = 10000.0 / cfg.cell_count();
  for (std::size_t c = 0; c < cfg.cell_count(); ++c) {
    EXPECT_EQ(grid.cell(c).size(), recount[c].size());
    total += grid.cell(c).size();
    const double d = static_cast<double>(grid.cell(c).size()) - expected;
    chi2 += d * d / expected;
  }
  EXPECT_EQ(total, 10000u);
  const boost::math::chi_squared dist(static_cast<double>(cfg.cell_count() - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001) << "chi2=" << chi2;
}

TEST(FrameScore, AllEmptyIsZero) {
  const auto grid = project_frame({}, lidar1_profile(), {8, 32});
  const auto s = frame_score(grid, WeightScheme{}, IntensityParams{});
  EXPECT_EQ(s.s, 0.0);
  EXPECT_EQ(unweighted_frame_score(grid, WeightScheme{}), 0.0);
  EXPECT_EQ(mean_range_variance(grid), 0.0);
  EXPECT_EQ(s.cells.size(), 256u);
}

TEST(FrameScore, OnePointOnThirtyTwoCells) {
  const std::vector<PolarPoint> pts{{5.0, 100.0, 0.0, 0.5}};
  const auto grid = project_frame(pts, lidar1_profile(), {4, 8});
  EXPECT_EQ(frame_score(grid, WeightScheme{}, IntensityParams{}).s, -0.03125);
}

TEST(FrameScore, FixedDenominator) {
  // Two filled cells, then one: |s| halves exactly.
  std::vector<PolarPoint> a, b;
  for (int i = 0; i < 6; ++i) {
    a.emplace_back(10.0 + i * 0.1, 1.0 + i, 0.0, 0.5);
    a.emplace_back(10.0 + i * 0.1, 91.0 + i, 0.0, 0.5);
    b.emplace_back(10.0 + i * 0.1, 1.0 + i, 0.0, 0.5);
  }
  const auto prof = lidar1_profile();
  const double sa = frame_score(project_frame(a, prof, {8, 32}), WeightScheme{}, {}).s;
  const double sb = frame_score(project_frame(b, prof, {8, 32}), WeightScheme{}, {}).s;
  EXPECT_NE(sa, 0.0);
  EXPECT_EQ(sb * 2.0, sa);
}

TEST(FrameScore, MatchesOracleAndBounds) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto prof = seed % 2 ? lidar1_profile() : lidar2_profile();
    const auto cfg = GridConfig::for_profile(prof);
    const auto pts = oracle::random_frame(seed, 4000, prof);
    const auto grid = project_frame(pts, prof, cfg);
    for (bool uniform : {false, true}) {
      const auto scheme = uniform ? WeightScheme::uniform() : WeightScheme{};
      const IntensityParams params{prof.gamma_ref, 1.5};
      const auto got = frame_score(grid, scheme, params);
      const auto want = oracle::score(pts, prof, cfg.rows, cfg.cols, uniform, params.gamma_ref, 1.5);
      EXPECT_NEAR(got.s, want.s, 1e-9 * std::max(1e-3, std::abs(want.s)));
      EXPECT_NEAR(got.unweighted(), want.unweighted, 1e-9 * std::max(1e-3, std::abs(want.unweighted)));
      EXPECT_NEAR(unweighted_frame_score(grid, scheme), got.unweighted(), 1e-15);
      EXPECT_NEAR(mean_range_variance(grid), want.mean_variance, 1e-9 * want.mean_variance);
      EXPECT_LE(std::abs(got.s), std::exp(1.5));
    }
  }
}

TEST(FrameScore, BrightCellsMakeWeightedEqualUnweighted) {
  auto pts = oracle::random_frame(3, 2000, lidar1_profile());
  for (auto& p : pts) p.intensity = 0.2 + p.intensity;
  const auto grid = project_frame(pts, lidar1_profile(), {8, 32});
  const auto s = frame_score(grid, WeightScheme{}, IntensityParams{0.15, 1.0});
  EXPECT_EQ(s.s, unweighted_frame_score(grid, WeightScheme{}));
}

TEST(FrameScore, Deterministic) {
  const auto pts = oracle::random_frame(4, 20000, lidar1_profile());
  const auto grid = project_frame(pts, lidar1_profile(), {8, 32});
  const double a = frame_score(grid, WeightScheme{}, {}).s;
  const double b = frame_score(grid, WeightScheme{}, {}).s;
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b));
}

TEST(FrameScore, ConstantRangeCellsHaveZeroVariance) {
  std::vector<PolarPoint> pts;
  for (int i = 0; i < 200; ++i) pts.emplace_back(12.0, i * 1.7, -19.0 + (i % 40), 0.3);
  const auto grid = project_frame(pts, lidar1_profile(), {8, 32});
  EXPECT_EQ(mean_range_variance(grid), 0.0);
}

TEST(FrameScore, ClusteredLowIntensityNoiseWeightsBelowUnweighted) {
  const auto prof = lidar2_profile();
  const auto clean = generate_scene(named_scene("roadside", prof), 21);
  NoiseSpec noise{ClusteredNoise{35.0, 0.0, 22.0, 8.0, 0.5, 60, 0.02, true}, 5};
  const auto noisy = inject_noise(clean, noise, prof);
  const auto grid = project_frame(noisy.points, prof, GridConfig::for_profile(prof));
  const auto s = frame_score(grid, WeightScheme{}, IntensityParams{});
  EXPECT_GT(s.unweighted(), s.s);
}

// A planar wall filling the view, 20 m away with 5 cm range noise.
TEST(FrameScore, WallSceneScoresNearOne) {
  const auto prof = lidar2_profile();
  SceneSpec spec;
  spec.profile = prof;
  Surface wall;
  wall.azimuth_min = prof.azimuth_min;
  wall.azimuth_max = prof.azimuth_max;
  wall.elevation_min = prof.elevation_min;
  wall.elevation_max = prof.elevation_max + 1e-9;
  wall.range = 20.0;
  wall.range_jitter = 0.05;
  wall.yaw = -20.0;
  spec.surfaces.push_back(wall);
  const auto frame = generate_scene(spec, 1);
  const auto cfg = GridConfig::for_profile(prof);
  const auto grid = project_frame(frame.points, prof, cfg);
  const auto s = frame_score(grid, WeightScheme{}, IntensityParams{});
  const auto want = oracle::score(frame.points, prof, cfg.rows, cfg.cols, false, 0.15, 1.0);
  EXPECT_NEAR(s.s, want.s, 1e-9 * std::abs(want.s));
  EXPECT_GE(s.s, 0.9);
  EXPECT_LE(s.s, 1.0);
}

}  // namespace
}  // namespace pcq
