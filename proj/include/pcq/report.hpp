// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0
//
// CSV reports: score series, threshold sweeps, score CDFs and grid dumps.

#ifndef PCQ_REPORT_HPP_
#define PCQ_REPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcq/errors.hpp"
#include "pcq/grid.hpp"
#include "pcq/parallel.hpp"

namespace pcq {

inline constexpr std::string_view kScoreCsvHeader =
    "frame_id,timestamp_us,score,unweighted_score,mean_range_variance";
inline constexpr std::string_view kLabelCsvHeader = "frame_id,label";
inline constexpr std::string_view kThresholdCsvHeader =
    "threshold,positive_kept_fraction,negative_filtered_fraction,positive_kept,positive_total,"
    "negative_filtered,negative_total";
inline constexpr std::string_view kCdfCsvHeader = "label,score,cumulative_fraction";
inline constexpr std::string_view kGridCsvHeader =
    "row,col,count,autocorrelation,multiplier,product,status";

inline constexpr double kDefaultFlagThreshold = -0.4;

struct ScoreRow {
  std::uint64_t frame_id = 0;
  std::int64_t timestamp_us = 0;
  double score = 0.0;
  double unweighted = 0.0;
  double mean_range_variance = 0.0;

  bool operator==(const ScoreRow&) const = default;
};

/// Rows with strictly increasing frame ids.
class ScoreSeries {
 public:
  ScoreSeries() = default;
  /// Throws ConfigError unless frame ids strictly increase.
  explicit ScoreSeries(std::vector<ScoreRow> rows);

  void append(const ScoreRow& row);
  const std::vector<ScoreRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

 private:
  std::vector<ScoreRow> rows_;
};

ScoreRow to_row(const FrameReport& report);

std::string write_score_csv(const ScoreSeries& series);
ScoreSeries read_score_csv(std::string_view text);

enum class Label { kPositive, kNegative };

/// `frame_id,label` rows with label "positive" or "negative".
std::map<std::uint64_t, Label> read_labels_csv(std::string_view text);

/// Raised when scored frames have no label.
class UnlabeledFrameError : public Error {
 public:
  explicit UnlabeledFrameError(std::vector<std::uint64_t> frame_ids);
  const std::vector<std::uint64_t>& frame_ids() const noexcept { return ids_; }

 private:
  std::vector<std::uint64_t> ids_;
};

struct ThresholdRow {
  double threshold = 0.0;
  std::size_t positive_kept = 0;      ///< positives with score < threshold
  std::size_t positive_total = 0;
  std::size_t negative_filtered = 0;  ///< negatives with score >= threshold
  std::size_t negative_total = 0;

  /// Fractions are 0 when the class has no frames.
  double kept_fraction() const noexcept;
  double filtered_fraction() const noexcept;
};

struct ThresholdReport {
  std::vector<ThresholdRow> rows;  ///< ascending threshold
};

/// Thresholds are sorted and deduplicated. Labels for frames that are not in
/// the series are ignored; scored frames without a label are an error.
ThresholdReport threshold_report(const ScoreSeries& series,
                                 const std::map<std::uint64_t, Label>& labels,
                                 std::vector<double> thresholds);

/// -1.0, -0.9, ..., 1.0
std::vector<double> default_thresholds();

struct CdfPoint {
  Label label = Label::kPositive;
  double score = 0.0;
  double cumulative_fraction = 0.0;  ///< share of the class scoring <= score
};

/// One point per distinct score and class, positives first. Each class ends
/// at exactly 1.0.
std::vector<CdfPoint> score_cdf(const ScoreSeries& series,
                                const std::map<std::uint64_t, Label>& labels);

std::string write_threshold_csv(const ThresholdReport& report);
std::string write_cdf_csv(std::span<const CdfPoint> cdf);

/// One row per cell, row-major. Status is "empty", "flagged" (I below the
/// flag threshold) or "ok".
std::string write_grid_csv(const FrameScore& score, const FrameGrid& grid,
                           double flag_threshold = kDefaultFlagThreshold);

/// Number of non-empty cells with I below the threshold.
std::size_t flagged_cells(const FrameScore& score, double flag_threshold = kDefaultFlagThreshold);

std::string_view label_name(Label label) noexcept;

}  // namespace pcq

#endif  // PCQ_REPORT_HPP_
