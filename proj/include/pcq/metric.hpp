// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-cell pointcloud quality kernel: spatial autocorrelation (Moran's I) of
// the range values of a point set, and the low-intensity weight multiplier.

#ifndef PCQ_METRIC_HPP_
#define PCQ_METRIC_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace pcq {

/// Wraps an angle in degrees into [0, 360).
double normalize_azimuth(double degrees) noexcept;

/// One LiDAR return in sensor polar coordinates.
///
/// range is in meters; range == 0 marks a slot without detection and never
/// enters a metric. Angles are in degrees, intensity is normalized to [0, 1].
struct PolarPoint {
  double range = 0.0;
  double azimuth = 0.0;
  double elevation = 0.0;
  double intensity = 0.0;

  PolarPoint() = default;
  PolarPoint(double range_m, double azimuth_deg, double elevation_deg,
             double intensity_norm) noexcept
      : range(range_m),
        azimuth(normalize_azimuth(azimuth_deg)),
        elevation(elevation_deg),
        intensity(intensity_norm) {}

  bool valid() const noexcept { return range > 0.0; }

  friend bool operator==(const PolarPoint&, const PolarPoint&) = default;
};

/// Ordered collection of valid detections. Metric operations take a
/// std::span<const PolarPoint> so cells can be viewed without copying.
using PointSet = std::vector<PolarPoint>;

enum class WeightKind {
  kUniform,                ///< w_ij = 1 for i != j
  kInverseAngularSquared,  ///< w_ij = d_ij^-2, d in degrees
};

struct WeightScheme {
  WeightKind kind = WeightKind::kInverseAngularSquared;
  /// Lower clamp on angular distance in degrees. Only used by the
  /// inverse-angular scheme; keeps coincident directions finite.
  double min_angular_separation = 0.05;

  static WeightScheme uniform() { return {WeightKind::kUniform, 0.05}; }
  static WeightScheme inverse_angular(double min_sep = 0.05) {
    return {WeightKind::kInverseAngularSquared, min_sep};
  }

  /// Throws ConfigError when min_angular_separation is not a positive number.
  void validate() const;
};

struct IntensityParams {
  double gamma_ref = 0.15;  ///< nominal mean intensity, in (0, 1]
  double k = 1.0;           ///< scale factor, > 0

  void validate() const;
};

/// Result of scoring one non-empty grid cell.
struct CellScore {
  double autocorrelation = 0.0;  ///< I
  double multiplier = 1.0;       ///< K_gamma
  std::size_t count = 0;         ///< N
  double product = 0.0;          ///< K_gamma * I

  friend bool operator==(const CellScore&, const CellScore&) = default;
};

/// Circular azimuth difference a - b wrapped into (-180, 180].
double wrapped_azimuth_delta(double a, double b) noexcept;

/// Weight between two distinct points. The i == j case is the caller's
/// business; it is always zero.
double pairwise_weight(const PolarPoint& a, const PolarPoint& b,
                       const WeightScheme& scheme);

/// Moran's I of the range values.
///
/// N == 1 gives -1. N >= 2 with all ranges equal gives +1 (the 0/0 case is
/// read as maximal clustering). Throws EmptySetError for N == 0 and
/// NonFiniteInputError when a range is not finite. Accumulation runs in
/// stored point order, so the result is a pure function of the input.
double spatial_autocorrelation(std::span<const PolarPoint> points,
                               const WeightScheme& scheme);

/// exp(k * max(0, gamma_ref - mean_intensity) / gamma_ref). Always >= 1.
double intensity_multiplier(std::span<const PolarPoint> points,
                            const IntensityParams& params);

CellScore weighted_cell_score(std::span<const PolarPoint> points,
                              const WeightScheme& scheme,
                              const IntensityParams& params);

/// Population variance of the ranges. Diagnostic only.
double range_variance(std::span<const PolarPoint> points);

}  // namespace pcq

#endif  // PCQ_METRIC_HPP_
