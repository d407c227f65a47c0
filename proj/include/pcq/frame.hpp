// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCQ_FRAME_HPP_
#define PCQ_FRAME_HPP_

#include <cstdint>
#include <vector>

#include "pcq/metric.hpp"

namespace pcq {

/// One scan. Range-0 sentinel slots are kept as-is until projection.
struct FrameRecord {
  std::uint64_t frame_id = 0;
  std::int64_t timestamp_us = 0;
  std::vector<PolarPoint> points;

  std::size_t valid_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : points) n += p.valid() ? 1 : 0;
    return n;
  }

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

}  // namespace pcq

#endif  // PCQ_FRAME_HPP_
