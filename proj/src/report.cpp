// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcq/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "pcq/io.hpp"

namespace pcq {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto at = line.find(sep);
    out.push_back(trim(line.substr(0, at)));
    if (at == std::string_view::npos) return out;
    line.remove_prefix(at + 1);
  }
}

template <typename T>
T field(std::string_view s, std::size_t line_no, std::string_view name) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw ParseError(line_no, "bad " + std::string(name) + " '" + std::string(s) + "'");
  }
  return v;
}

// Calls fn(line_no, fields) for each non-blank line after the header.
template <typename Fn>
void for_each_row(std::string_view text, std::string_view header, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) {
        throw ParseError(line_no, "expected header '" + std::string(header) + "'");
      }
      seen_header = true;
      continue;
    }
    fn(line_no, split(line, ','));
  }
  if (!seen_header) throw ParseError(line_no, "missing header '" + std::string(header) + "'");
}

std::string join_ids(const std::vector<std::uint64_t>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

ScoreSeries::ScoreSeries(std::vector<ScoreRow> rows) {
  rows_.reserve(rows.size());
  for (const auto& r : rows) append(r);
}

void ScoreSeries::append(const ScoreRow& row) {
  if (!rows_.empty() && row.frame_id <= rows_.back().frame_id) {
    throw ConfigError("frame ids must strictly increase: " + std::to_string(row.frame_id) +
                      " after " + std::to_string(rows_.back().frame_id));
  }
  rows_.push_back(row);
}

ScoreRow to_row(const FrameReport& report) {
  return {report.score.frame_id, report.timestamp_us, report.score.s, report.unweighted,
          report.mean_range_variance};
}

std::string write_score_csv(const ScoreSeries& series) {
  std::string out(kScoreCsvHeader);
  out += '\n';
  for (const auto& r : series.rows()) {
    out += std::to_string(r.frame_id) + ',' + std::to_string(r.timestamp_us) + ',' +
           format_double(r.score) + ',' + format_double(r.unweighted) + ',' +
           format_double(r.mean_range_variance) + '\n';
  }
  return out;
}

ScoreSeries read_score_csv(std::string_view text) {
  ScoreSeries series;
  for_each_row(text, kScoreCsvHeader, [&](std::size_t ln, const auto& f) {
    if (f.size() != 5) throw ParseError(ln, "expected 5 fields, got " + std::to_string(f.size()));
    ScoreRow row{field<std::uint64_t>(f[0], ln, "frame_id"),
                 field<std::int64_t>(f[1], ln, "timestamp_us"), field<double>(f[2], ln, "score"),
                 field<double>(f[3], ln, "unweighted_score"),
                 field<double>(f[4], ln, "mean_range_variance")};
    if (!series.empty() && row.frame_id <= series.rows().back().frame_id) {
      throw ParseError(ln, "frame ids must strictly increase");
    }
    series.append(row);
  });
  return series;
}

std::map<std::uint64_t, Label> read_labels_csv(std::string_view text) {
  std::map<std::uint64_t, Label> labels;
  for_each_row(text, kLabelCsvHeader, [&](std::size_t ln, const auto& f) {
    if (f.size() != 2) throw ParseError(ln, "expected 2 fields, got " + std::to_string(f.size()));
    const auto id = field<std::uint64_t>(f[0], ln, "frame_id");
    Label label;
    if (f[1] == "positive") label = Label::kPositive;
    else if (f[1] == "negative") label = Label::kNegative;
    else throw ParseError(ln, "label must be 'positive' or 'negative', got '" + std::string(f[1]) + "'");
    if (!labels.emplace(id, label).second) {
      throw ParseError(ln, "frame " + std::to_string(id) + " labeled twice");
    }
  });
  return labels;
}

UnlabeledFrameError::UnlabeledFrameError(std::vector<std::uint64_t> frame_ids)
    : Error("unlabeled frames: " + join_ids(frame_ids)), ids_(std::move(frame_ids)) {}

double ThresholdRow::kept_fraction() const noexcept {
  return positive_total == 0 ? 0.0 : static_cast<double>(positive_kept) / positive_total;
}

double ThresholdRow::filtered_fraction() const noexcept {
  return negative_total == 0 ? 0.0 : static_cast<double>(negative_filtered) / negative_total;
}

namespace {

// Scores split by class, sorted ascending.
struct ClassScores {
  std::vector<double> positive;
  std::vector<double> negative;
};

ClassScores split_by_label(const ScoreSeries& series,
                           const std::map<std::uint64_t, Label>& labels) {
  ClassScores out;
  std::vector<std::uint64_t> missing;
  for (const auto& r : series.rows()) {
    const auto it = labels.find(r.frame_id);
    if (it == labels.end()) {
      missing.push_back(r.frame_id);
      continue;
    }
    if (std::isnan(r.score)) {
      throw ConfigError("frame " + std::to_string(r.frame_id) + " has a NaN score");
    }
    (it->second == Label::kPositive ? out.positive : out.negative).push_back(r.score);
  }
  if (!missing.empty()) throw UnlabeledFrameError(std::move(missing));
  std::sort(out.positive.begin(), out.positive.end());
  std::sort(out.negative.begin(), out.negative.end());
  return out;
}

}  // namespace

ThresholdReport threshold_report(const ScoreSeries& series,
                                 const std::map<std::uint64_t, Label>& labels,
                                 std::vector<double> thresholds) {
  for (double t : thresholds) {
    if (std::isnan(t)) throw ConfigError("threshold is NaN");
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const ClassScores scores = split_by_label(series, labels);
  ThresholdReport report;
  report.rows.reserve(thresholds.size());
  for (double t : thresholds) {
    ThresholdRow row;
    row.threshold = t;
    row.positive_total = scores.positive.size();
    row.negative_total = scores.negative.size();
    row.positive_kept = static_cast<std::size_t>(
        std::lower_bound(scores.positive.begin(), scores.positive.end(), t) -
        scores.positive.begin());
    row.negative_filtered = static_cast<std::size_t>(
        scores.negative.end() -
        std::lower_bound(scores.negative.begin(), scores.negative.end(), t));
    report.rows.push_back(row);
  }
  return report;
}

std::vector<double> default_thresholds() {
  std::vector<double> out;
  for (int i = -10; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

std::vector<CdfPoint> score_cdf(const ScoreSeries& series,
                                const std::map<std::uint64_t, Label>& labels) {
  const ClassScores scores = split_by_label(series, labels);
  std::vector<CdfPoint> out;
  auto emit = [&](Label label, const std::vector<double>& v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i + 1 < n && v[i + 1] == v[i]) continue;
      // The last point is exactly 1 since (i + 1) == n.
      out.push_back({label, v[i], static_cast<double>(i + 1) / static_cast<double>(n)});
    }
  };
  emit(Label::kPositive, scores.positive);
  emit(Label::kNegative, scores.negative);
  return out;
}

std::string write_threshold_csv(const ThresholdReport& report) {
  std::string out(kThresholdCsvHeader);
  out += '\n';
  for (const auto& r : report.rows) {
    out += format_double(r.threshold) + ',' + format_double(r.kept_fraction()) + ',' +
           format_double(r.filtered_fraction()) + ',' + std::to_string(r.positive_kept) + ',' +
           std::to_string(r.positive_total) + ',' + std::to_string(r.negative_filtered) + ',' +
           std::to_string(r.negative_total) + '\n';
  }
  return out;
}

std::string write_cdf_csv(std::span<const CdfPoint> cdf) {
  std::string out(kCdfCsvHeader);
  out += '\n';
  for (const auto& p : cdf) {
    out += std::string(label_name(p.label)) + ',' + format_double(p.score) + ',' +
           format_double(p.cumulative_fraction) + '\n';
  }
  return out;
}

std::string write_grid_csv(const FrameScore& score, const FrameGrid& grid,
                           double flag_threshold) {
  std::string out(kGridCsvHeader);
  out += '\n';
  for (std::uint32_t r = 0; r < score.rows; ++r) {
    for (std::uint32_t c = 0; c < score.cols; ++c) {
      const std::size_t flat = static_cast<std::size_t>(r) * score.cols + c;
      const auto& cell = score.cells[flat];
      out += std::to_string(r) + ',' + std::to_string(c) + ',' +
             std::to_string(grid.cell(flat).size()) + ',';
      if (!cell) {
        out += ",,,empty\n";
        continue;
      }
      out += format_double(cell->autocorrelation) + ',' + format_double(cell->multiplier) + ',' +
             format_double(cell->product) + ',' +
             (cell->autocorrelation < flag_threshold ? "flagged" : "ok") + '\n';
    }
  }
  return out;
}

std::size_t flagged_cells(const FrameScore& score, double flag_threshold) {
  return static_cast<std::size_t>(
      std::count_if(score.cells.begin(), score.cells.end(), [&](const auto& c) {
        return c && c->autocorrelation < flag_threshold;
      }));
}

std::string_view label_name(Label label) noexcept {
  return label == Label::kPositive ? "positive" : "negative";
}

}  // namespace pcq
