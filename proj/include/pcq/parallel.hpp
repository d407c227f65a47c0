// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Host-thread execution of per-cell work. Each cell is scored wholly by one
// worker and results are assembled in cell-index order, so outputs do not
// depend on the number of workers.

#ifndef PCQ_PARALLEL_HPP_
#define PCQ_PARALLEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pcq/frame.hpp"
#include "pcq/grid.hpp"
#include "pcq/metric.hpp"

namespace pcq {

struct ExecPolicy {
  /// 0 means "auto": one worker per hardware thread.
  std::size_t workers = 0;
  std::size_t cells_per_task = 4;

  std::size_t resolved_workers() const noexcept;

  static ExecPolicy serial() { return {1, 4}; }
  /// Parses "auto" or a positive count.
  static ExecPolicy parse(std::string_view workers);
};

using CellFunction = std::function<CellScore(std::span<const PolarPoint>)>;

class CellEngine {
 public:
  explicit CellEngine(ExecPolicy policy = {});
  ~CellEngine();
  CellEngine(const CellEngine&) = delete;
  CellEngine& operator=(const CellEngine&) = delete;

  std::size_t workers() const noexcept { return workers_; }
  const ExecPolicy& policy() const noexcept { return policy_; }

  /// Applies fn to every non-empty cell. Empty cells stay absent. If any
  /// cell throws, the error of the lowest-index failing cell is rethrown
  /// after all tasks have finished.
  std::vector<std::optional<CellScore>> map_cells(const FrameGrid& grid,
                                                  const CellFunction& fn) const;

 private:
  struct Pool;
  ExecPolicy policy_;
  std::size_t workers_;
  std::unique_ptr<Pool> pool_;
};

/// Supplies frames by index. load() may throw; the stream reports that frame
/// as an error item and moves on.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::size_t size() const = 0;
  virtual std::uint64_t frame_id(std::size_t index) const = 0;
  virtual FrameRecord load(std::size_t index) const = 0;
};

struct FrameReport {
  FrameScore score;
  std::int64_t timestamp_us = 0;
  double unweighted = 0.0;
  double mean_range_variance = 0.0;
};

struct StreamError {
  std::string message;
};

struct StreamItem {
  std::size_t index = 0;  ///< position in the source
  std::uint64_t frame_id = 0;
  std::variant<FrameReport, StreamError> result;

  bool ok() const noexcept { return std::holds_alternative<FrameReport>(result); }
  const FrameReport& report() const { return std::get<FrameReport>(result); }
};

struct StreamConfig {
  SensorProfile profile;
  GridConfig grid;
  WeightScheme scheme;
  IntensityParams params;
  std::size_t cadence = 10;  ///< score every Nth frame
};

/// Scores frames 0, cadence, 2*cadence, ... in source order. The next frame
/// is loaded while the current one is scored; sink sees items in order.
void score_stream(const FrameSource& source, const StreamConfig& config,
                  const CellEngine& engine,
                  const std::function<void(const StreamItem&)>& sink);

std::vector<StreamItem> score_stream(const FrameSource& source, const StreamConfig& config,
                                     const CellEngine& engine);

/// Scores one in-memory frame end to end.
FrameReport score_frame(const FrameRecord& frame, const StreamConfig& config,
                        const CellEngine& engine);

}  // namespace pcq

#endif  // PCQ_PARALLEL_HPP_
