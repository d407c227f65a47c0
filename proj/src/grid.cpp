// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcq/grid.hpp"

#include <charconv>
#include <cmath>

#include "pcq/errors.hpp"
#include "pcq/parallel.hpp"

namespace pcq {

void SensorProfile::validate() const {
  const double az = azimuth_span();
  if (!(az > 0.0 && az <= 360.0)) {
    throw ConfigError("profile '" + name + "': azimuth span must be in (0, 360]");
  }
  if (!(elevation_span() > 0.0)) {
    throw ConfigError("profile '" + name + "': elevation span must be positive");
  }
  if (rows == 0 || cols == 0) {
    throw ConfigError("profile '" + name + "': array dimensions must be positive");
  }
  if (grid_rows == 0 || grid_cols == 0) {
    throw ConfigError("profile '" + name + "': default grid must be non-empty");
  }
  if (!(gamma_ref > 0.0 && gamma_ref <= 1.0)) {
    throw ConfigError("profile '" + name + "': gamma_ref must lie in (0, 1]");
  }
}

SensorProfile lidar1_profile() {
  SensorProfile p;
  p.name = "lidar1";
  p.azimuth_min = 0.0;
  p.azimuth_max = 360.0;
  p.elevation_min = -20.0;
  p.elevation_max = 20.0;
  p.rows = 64;
  p.cols = 1024;
  p.grid_rows = 8;
  p.grid_cols = 32;
  return p;
}

SensorProfile lidar2_profile() {
  SensorProfile p;
  p.name = "lidar2";
  p.azimuth_min = -60.0;
  p.azimuth_max = 60.0;
  p.elevation_min = -12.5;
  p.elevation_max = 12.5;
  p.rows = 128;
  p.cols = 512;
  p.grid_rows = 8;
  p.grid_cols = 16;
  return p;
}

SensorProfile builtin_profile(std::string_view name) {
  if (name == "lidar1") return lidar1_profile();
  if (name == "lidar2") return lidar2_profile();
  throw ConfigError("unknown sensor profile '" + std::string(name) +
                    "' (known: lidar1, lidar2)");
}

void GridConfig::validate() const {
  if (rows == 0 || cols == 0) {
    throw ConfigError("grid must have at least one row and one column");
  }
}

GridConfig parse_grid(std::string_view text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string_view::npos) {
    throw ConfigError("grid must be given as VxH, got '" + std::string(text) + "'");
  }
  GridConfig g;
  const auto v = text.substr(0, x);
  const auto h = text.substr(x + 1);
  auto rv = std::from_chars(v.data(), v.data() + v.size(), g.rows);
  auto rh = std::from_chars(h.data(), h.data() + h.size(), g.cols);
  if (rv.ec != std::errc{} || rv.ptr != v.data() + v.size() || rh.ec != std::errc{} ||
      rh.ptr != h.data() + h.size()) {
    throw ConfigError("grid must be given as VxH, got '" + std::string(text) + "'");
  }
  g.validate();
  return g;
}

namespace {

std::uint32_t bin_of(double offset, double span, std::uint32_t bins) noexcept {
  if (!(offset > 0.0)) return 0;  // also catches NaN
  const double b = std::floor(offset / span * bins);
  if (b >= static_cast<double>(bins)) return bins - 1;
  return static_cast<std::uint32_t>(b);
}

}  // namespace

CellIndex locate_cell(double azimuth, double elevation, const SensorProfile& profile,
                      const GridConfig& config) noexcept {
  CellIndex idx;

  if (elevation >= profile.elevation_max) {
    idx.row = config.rows - 1;
  } else {
    idx.row = bin_of(elevation - profile.elevation_min, profile.elevation_span(),
                     config.rows);
  }

  const double offset = normalize_azimuth(azimuth - profile.azimuth_min);
  if (profile.full_circle()) {
    idx.col = bin_of(offset, 360.0, config.cols);
  } else {
    const double span = profile.azimuth_span();
    if (offset < span) {
      idx.col = bin_of(offset, span, config.cols);
    } else {
      // Outside the view: snap to whichever edge is angularly closer.
      const double past_max = offset - span;
      const double before_min = 360.0 - offset;
      idx.col = past_max <= before_min ? config.cols - 1 : 0;
    }
  }
  return idx;
}

FrameGrid::FrameGrid(SensorProfile profile, GridConfig config)
    : profile_(std::move(profile)), config_(config) {
  profile_.validate();
  config_.validate();
  cells_.resize(config_.cell_count());
}

std::size_t FrameGrid::point_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : cells_) n += c.size();
  return n;
}

std::size_t FrameGrid::non_empty_cells() const noexcept {
  std::size_t n = 0;
  for (const auto& c : cells_) n += c.empty() ? 0 : 1;
  return n;
}

FrameGrid project_frame(std::span<const PolarPoint> frame, const SensorProfile& profile,
                        const GridConfig& config) {
  FrameGrid grid(profile, config);
  for (const auto& p : frame) {
    if (p.range == 0.0) {
      ++grid.dropped_invalid_;
      continue;
    }
    const CellIndex idx = locate_cell(p.azimuth, p.elevation, grid.profile_, grid.config_);
    grid.cells_[static_cast<std::size_t>(idx.row) * config.cols + idx.col].push_back(p);
  }
  return grid;
}

double FrameScore::unweighted() const noexcept {
  return average_over_cells(cells, &CellScore::autocorrelation);
}

double average_over_cells(std::span<const std::optional<CellScore>> cells,
                          double CellScore::*value) noexcept {
  if (cells.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : cells) {
    if (c) sum += (*c).*value;
  }
  return sum / static_cast<double>(cells.size());
}

FrameScore frame_score(const FrameGrid& grid, const WeightScheme& scheme,
                       const IntensityParams& params, const CellEngine* engine) {
  scheme.validate();
  params.validate();
  const auto start = std::chrono::steady_clock::now();

  const CellFunction fn = [&](std::span<const PolarPoint> pts) {
    return weighted_cell_score(pts, scheme, params);
  };
  FrameScore out;
  if (engine != nullptr) {
    out.cells = engine->map_cells(grid, fn);
  } else {
    const CellEngine serial(ExecPolicy::serial());
    out.cells = serial.map_cells(grid, fn);
  }
  out.rows = grid.config().rows;
  out.cols = grid.config().cols;
  out.s = average_over_cells(out.cells, &CellScore::product);
  out.compute_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

double unweighted_frame_score(const FrameGrid& grid, const WeightScheme& scheme,
                              const CellEngine* engine) {
  scheme.validate();
  const CellFunction fn = [&](std::span<const PolarPoint> pts) {
    CellScore c;
    c.autocorrelation = spatial_autocorrelation(pts, scheme);
    c.count = pts.size();
    c.product = c.autocorrelation;
    return c;
  };
  std::vector<std::optional<CellScore>> cells;
  if (engine != nullptr) {
    cells = engine->map_cells(grid, fn);
  } else {
    const CellEngine serial(ExecPolicy::serial());
    cells = serial.map_cells(grid, fn);
  }
  return average_over_cells(cells, &CellScore::product);
}

double mean_range_variance(const FrameGrid& grid) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const auto cell = grid.cell(i);
    if (cell.empty()) continue;
    sum += range_variance(cell);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace pcq
