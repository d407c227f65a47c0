// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Azimuth-elevation image grid: bucket a frame into V x H cells over a sensor
// field of view and fold per-cell scores into one frame score.

#ifndef PCQ_GRID_HPP_
#define PCQ_GRID_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcq/metric.hpp"

namespace pcq {

struct SensorProfile {
  std::string name;
  double azimuth_min = 0.0;  ///< degrees, may be negative for forward sensors
  double azimuth_max = 360.0;
  double elevation_min = -20.0;
  double elevation_max = 20.0;
  /// Nominal mean intensity of this sensor, normalized.
  double gamma_ref = 0.15;
  /// Native m x n return array (rows in elevation, columns in azimuth).
  std::uint32_t rows = 64;
  std::uint32_t cols = 1024;
  /// Default grid for this sensor.
  std::uint32_t grid_rows = 8;
  std::uint32_t grid_cols = 32;

  double azimuth_span() const noexcept { return azimuth_max - azimuth_min; }
  double elevation_span() const noexcept { return elevation_max - elevation_min; }
  bool full_circle() const noexcept { return azimuth_span() >= 360.0; }

  void validate() const;
};

/// 905 nm spinning sensor, 360 x 40 degrees.
SensorProfile lidar1_profile();
/// 1550 nm forward-looking sensor, 120 x 25 degrees.
SensorProfile lidar2_profile();
/// Looks up a built-in profile by name; throws ConfigError if unknown.
SensorProfile builtin_profile(std::string_view name);

struct GridConfig {
  std::uint32_t rows = 8;   ///< V, cells along elevation
  std::uint32_t cols = 32;  ///< H, cells along azimuth

  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(rows) * cols;
  }
  void validate() const;

  static GridConfig for_profile(const SensorProfile& profile) {
    return {profile.grid_rows, profile.grid_cols};
  }
};

/// Parses "VxH", e.g. "8x32".
GridConfig parse_grid(std::string_view text);

struct CellIndex {
  std::uint32_t row = 0;  ///< elevation bin
  std::uint32_t col = 0;  ///< azimuth bin
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Bin of a direction. Half-open bins, the top elevation bin closed above.
/// Out-of-view directions are clamped into the nearest edge cell.
CellIndex locate_cell(double azimuth, double elevation, const SensorProfile& profile,
                      const GridConfig& config) noexcept;

/// A frame bucketed into cells, stored row-major (row * cols + col).
class FrameGrid {
 public:
  FrameGrid(SensorProfile profile, GridConfig config);

  const SensorProfile& profile() const noexcept { return profile_; }
  const GridConfig& config() const noexcept { return config_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  std::span<const PolarPoint> cell(std::size_t row, std::size_t col) const {
    return cells_.at(row * config_.cols + col);
  }
  std::span<const PolarPoint> cell(std::size_t flat_index) const {
    return cells_.at(flat_index);
  }

  std::size_t dropped_invalid() const noexcept { return dropped_invalid_; }
  std::size_t point_count() const noexcept;
  std::size_t non_empty_cells() const noexcept;

 private:
  friend FrameGrid project_frame(std::span<const PolarPoint>, const SensorProfile&,
                                 const GridConfig&);
  SensorProfile profile_;
  GridConfig config_;
  std::vector<PointSet> cells_;
  std::size_t dropped_invalid_ = 0;
};

/// Buckets a frame. Range-0 sentinels are counted and dropped; every other
/// point lands in exactly one cell.
FrameGrid project_frame(std::span<const PolarPoint> frame, const SensorProfile& profile,
                        const GridConfig& config);

struct FrameScore {
  double s = 0.0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::optional<CellScore>> cells;  ///< row-major, empty cells absent
  std::uint64_t frame_id = 0;
  std::chrono::nanoseconds compute_time{0};

  /// Mean of the unweighted autocorrelation over all V*H cells.
  double unweighted() const noexcept;
};

/// Divides the row-major sum of present cells' `value` by the number of cells.
/// This is the one place the frame reduction happens.
double average_over_cells(std::span<const std::optional<CellScore>> cells,
                          double CellScore::*value) noexcept;

class CellEngine;

/// Frame score: fixed-order sum of K*I over non-empty cells divided by V*H.
/// Uses a serial engine when none is given.
FrameScore frame_score(const FrameGrid& grid, const WeightScheme& scheme,
                       const IntensityParams& params, const CellEngine* engine = nullptr);

/// Same as frame_score with every multiplier forced to 1.
double unweighted_frame_score(const FrameGrid& grid, const WeightScheme& scheme,
                              const CellEngine* engine = nullptr);

/// Mean range variance over non-empty cells; 0 when all cells are empty.
double mean_range_variance(const FrameGrid& grid);

}  // namespace pcq

#endif  // PCQ_GRID_HPP_
