// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "pcq/errors.hpp"
#include "pcq/grid.hpp"
#include "pcq/report.hpp"
#include "pcq/synth.hpp"

namespace pcq {
namespace {

ScoreSeries series_of(const std::vector<double>& scores) {
  ScoreSeries s;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    s.append({i * 10, static_cast<std::int64_t>(i) * 1000000, scores[i], scores[i] + 0.01, 1.5});
  }
  return s;
}

std::map<std::uint64_t, Label> all(const ScoreSeries& s, Label l) {
  std::map<std::uint64_t, Label> out;
  for (const auto& r : s.rows()) out[r.frame_id] = l;
  return out;
}

TEST(ScoreSeries, StrictlyIncreasingIds) {
  ScoreSeries s;
  s.append({1, 0, 0, 0, 0});
  EXPECT_THROW(s.append({1, 0, 0, 0, 0}), ConfigError);
  EXPECT_THROW(ScoreSeries({{3, 0, 0, 0, 0}, {2, 0, 0, 0, 0}}), ConfigError);
}

TEST(ScoreSeries, CsvRoundTrip) {
  const auto s = series_of({0.1, -0.3333333333333333, 0.7271754590145988});
  const auto csv = write_score_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kScoreCsvHeader);
  const auto back = read_score_csv(csv);
  EXPECT_EQ(back.rows(), s.rows());
  EXPECT_EQ(write_score_csv(back), csv);
  EXPECT_THROW(read_score_csv("a,b\n"), ParseError);
  EXPECT_THROW(read_score_csv(std::string(kScoreCsvHeader) + "\n1,0,0.5\n"), ParseError);
  EXPECT_THROW(read_score_csv(std::string(kScoreCsvHeader) + "\n2,0,0,0,0\n1,0,0,0,0\n"),
               ParseError);
}

TEST(Labels, Parse) {
  const auto l = read_labels_csv("frame_id,label\n0,positive\n10,negative\n");
  EXPECT_EQ(l.at(0), Label::kPositive);
  EXPECT_EQ(l.at(10), Label::kNegative);
  EXPECT_THROW(read_labels_csv("frame_id,label\n0,maybe\n"), ParseError);
  EXPECT_THROW(read_labels_csv("frame_id,label\n0,positive\n0,negative\n"), ParseError);
}

TEST(ThresholdReport, Boundaries) {
  const auto s = series_of({0.2, 0.5, -0.1, 0.9});
  const auto labels = all(s, Label::kPositive);
  const auto r = threshold_report(s, labels, {1.0, -0.5});
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].threshold, -0.5);
  EXPECT_EQ(r.rows[0].kept_fraction(), 0.0);
  EXPECT_EQ(r.rows[1].kept_fraction(), 1.0);
  EXPECT_EQ(r.rows[0].filtered_fraction(), 0.0);
  EXPECT_EQ(r.rows[0].negative_total, 0u);
}

TEST(ThresholdReport, TiesAtThreshold) {
  const auto s = series_of({0.5, 0.5});
  std::map<std::uint64_t, Label> labels{{0, Label::kPositive}, {10, Label::kNegative}};
  const auto r = threshold_report(s, labels, {0.5});
  EXPECT_EQ(r.rows[0].positive_kept, 0u);      // 0.5 < 0.5 is false
  EXPECT_EQ(r.rows[0].negative_filtered, 1u);  // 0.5 >= 0.5
}

TEST(ThresholdReport, UnlabeledFramesListed) {
  const auto s = series_of({0.1, 0.2, 0.3});
  std::map<std::uint64_t, Label> labels{{10, Label::kPositive}};
  try {
    threshold_report(s, labels, {0.0});
    FAIL();
  } catch (const UnlabeledFrameError& e) {
    EXPECT_EQ(e.frame_ids(), (std::vector<std::uint64_t>{0, 20}));
    EXPECT_NE(std::string(e.what()).find("0, 20"), std::string::npos);
  }
}

TEST(ThresholdReport, MatchesRecountAndIsMonotone) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores(1 + trial % 50);
    for (auto& v : scores) v = std::round(u(rng) * 20) / 20;  // plenty of ties
    const auto s = series_of(scores);
    std::map<std::uint64_t, Label> labels;
    for (const auto& r : s.rows()) labels[r.frame_id] = u(rng) < 0 ? Label::kPositive : Label::kNegative;
    std::vector<double> thresholds(15);
    for (auto& t : thresholds) t = std::round(u(rng) * 20) / 20;
    const auto rep = threshold_report(s, labels, thresholds);

    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& row = rep.rows[i];
      std::size_t pk = 0, pt = 0, nf = 0, nt = 0;
      for (const auto& r : s.rows()) {
        if (labels[r.frame_id] == Label::kPositive) {
          ++pt;
          if (r.score < row.threshold) ++pk;
        } else {
          ++nt;
          if (r.score >= row.threshold) ++nf;
        }
      }
      ASSERT_EQ(row.positive_kept, pk);
      ASSERT_EQ(row.positive_total, pt);
      ASSERT_EQ(row.negative_filtered, nf);
      ASSERT_EQ(row.negative_total, nt);
      if (i > 0) {
        ASSERT_LT(rep.rows[i - 1].threshold, row.threshold);
        ASSERT_LE(rep.rows[i - 1].kept_fraction(), row.kept_fraction());
        ASSERT_GE(rep.rows[i - 1].filtered_fraction(), row.filtered_fraction());
      }
    }
  }
}

TEST(Cdf, ValidPerClass) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores(1 + trial % 40);
    for (auto& v : scores) v = std::round(u(rng) * 10) / 10;
    const auto s = series_of(scores);
    std::map<std::uint64_t, Label> labels;
    for (const auto& r : s.rows()) labels[r.frame_id] = u(rng) < 0 ? Label::kPositive : Label::kNegative;
    const auto cdf = score_cdf(s, labels);
    for (Label l : {Label::kPositive, Label::kNegative}) {
      std::vector<CdfPoint> pts;
      for (const auto& p : cdf) {
        if (p.label == l) pts.push_back(p);
      }
      if (pts.empty()) continue;
      for (std::size_t i = 1; i < pts.size(); ++i) {
        ASSERT_LT(pts[i - 1].score, pts[i].score);
        ASSERT_LT(pts[i - 1].cumulative_fraction, pts[i].cumulative_fraction);
      }
      ASSERT_EQ(pts.back().cumulative_fraction, 1.0);
    }
  }
  const auto csv = write_cdf_csv(score_cdf(series_of({0.3, 0.1, 0.3}), all(series_of({0, 0, 0}), Label::kNegative)));
  EXPECT_EQ(csv, "label,score,cumulative_fraction\nnegative,0.1,0.3333333333333333\nnegative,0.3,1\n");
}

TEST(ThresholdCsv, Layout) {
  const auto s = series_of({0.1, 0.6});
  std::map<std::uint64_t, Label> labels{{0, Label::kPositive}, {10, Label::kNegative}};
  EXPECT_EQ(write_threshold_csv(threshold_report(s, labels, {0.5})),
            std::string(kThresholdCsvHeader) + "\n0.5,1,1,1,1,1,1\n");
  EXPECT_EQ(default_thresholds().size(), 21u);
}

TEST(GridCsv, EmptyAndSinglePoint) {
  const auto prof = lidar2_profile();
  const auto empty = project_frame({}, prof, {2, 2});
  const auto es = frame_score(empty, WeightScheme{}, {});
  EXPECT_EQ(write_grid_csv(es, empty),
            std::string(kGridCsvHeader) + "\n0,0,0,,,,empty\n0,1,0,,,,empty\n1,0,0,,,,empty\n1,1,0,,,,empty\n");

  const std::vector<PolarPoint> one{{5.0, 10.0, 5.0, 0.5}};
  const auto g = project_frame(one, prof, {2, 2});
  const auto s = frame_score(g, WeightScheme{}, {});
  const auto csv = write_grid_csv(s, g);
  EXPECT_NE(csv.find("\n1,1,1,-1,1,-1,flagged\n"), std::string::npos) << csv;
  EXPECT_EQ(flagged_cells(s), 1u);
  EXPECT_EQ(flagged_cells(s, -1.0), 0u);
}

TEST(GridCsv, EmiFrameFlagsMoreCells) {
  const auto prof = lidar2_profile();
  const auto clean = generate_scene(named_scene("street", prof), 3);
  const auto noisy = inject_noise(clean, NoiseSpec{ScatteredNoise{1000}, 4}, prof);
  auto flags = [&](const FrameRecord& f) {
    const auto g = project_frame(f.points, prof, GridConfig::for_profile(prof));
    return flagged_cells(frame_score(g, WeightScheme{}, {}));
  };
  EXPECT_GT(flags(noisy), flags(clean));
}

}  // namespace
}  // namespace pcq
