// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcq/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "pcq/errors.hpp"

namespace pcq {

double normalize_azimuth(double degrees) noexcept {
  if (!std::isfinite(degrees)) return degrees;
  double wrapped = std::fmod(degrees, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  // fmod of a tiny negative value plus 360 can round up to exactly 360.
  if (wrapped >= 360.0) wrapped = 0.0;
  return wrapped;
}

double wrapped_azimuth_delta(double a, double b) noexcept {
  double d = std::fmod(a - b, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

void WeightScheme::validate() const {
  if (!(min_angular_separation > 0.0) || !std::isfinite(min_angular_separation)) {
    throw ConfigError("min_angular_separation must be a positive finite number, got " +
                      std::to_string(min_angular_separation));
  }
}

void IntensityParams::validate() const {
  if (!(gamma_ref > 0.0 && gamma_ref <= 1.0)) {
    throw ConfigError("gamma_ref must lie in (0, 1], got " + std::to_string(gamma_ref));
  }
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ConfigError("k must be a positive finite number, got " + std::to_string(k));
  }
}

double pairwise_weight(const PolarPoint& a, const PolarPoint& b,
                       const WeightScheme& scheme) {
  if (scheme.kind == WeightKind::kUniform) return 1.0;
  const double dtheta = wrapped_azimuth_delta(a.azimuth, b.azimuth);
  const double dphi = a.elevation - b.elevation;
  const double d = std::max(std::hypot(dtheta, dphi), scheme.min_angular_separation);
  return 1.0 / (d * d);
}

namespace {

void check_finite(std::span<const PolarPoint> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.range)) {
      throw NonFiniteInputError("range of point " + std::to_string(i) + " is not finite");
    }
    if (!std::isfinite(p.azimuth) || !std::isfinite(p.elevation)) {
      throw NonFiniteInputError("direction of point " + std::to_string(i) +
                                " is not finite");
    }
  }
}

double mean_range(std::span<const PolarPoint> points) {
  double sum = 0.0;
  for (const auto& p : points) sum += p.range;
  return sum / static_cast<double>(points.size());
}

// Sum over ordered pairs i != j of w_ij * z_i * z_j, and of w_ij, for the
// inverse-angular scheme. Each unordered pair is visited once and doubled.
// Four fixed lanes break the add dependency chain; lane assignment depends
// only on the index, so the result is reproducible.
struct PairSums {
  double cross = 0.0;
  double weight = 0.0;
};

PairSums inverse_angular_sums(const std::vector<double>& az,
                              const std::vector<double>& el,
                              const std::vector<double>& z, double min_sep) {
  const std::size_t n = z.size();
  const double floor_sq = min_sep * min_sep;
  PairSums total;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ai = az[i];
    const double ei = el[i];
    std::array<double, 4> wz{0.0, 0.0, 0.0, 0.0};
    std::array<double, 4> ws{0.0, 0.0, 0.0, 0.0};
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      for (std::size_t l = 0; l < 4; ++l) {
        double da = std::fabs(ai - az[j + l]);
        da = std::min(da, 360.0 - da);
        const double de = ei - el[j + l];
        const double w = 1.0 / std::max(da * da + de * de, floor_sq);
        ws[l] += w;
        wz[l] += w * z[j + l];
      }
    }
    for (std::size_t l = 0; j < n; ++j, ++l) {
      double da = std::fabs(ai - az[j]);
      da = std::min(da, 360.0 - da);
      const double de = ei - el[j];
      const double w = 1.0 / std::max(da * da + de * de, floor_sq);
      ws[l] += w;
      wz[l] += w * z[j];
    }
    total.cross += z[i] * ((wz[0] + wz[1]) + (wz[2] + wz[3]));
    total.weight += (ws[0] + ws[1]) + (ws[2] + ws[3]);
  }
  total.cross *= 2.0;
  total.weight *= 2.0;
  return total;
}

}  // namespace

double spatial_autocorrelation(std::span<const PolarPoint> points,
                               const WeightScheme& scheme) {
  const std::size_t n = points.size();
  if (n == 0) throw EmptySetError();
  check_finite(points);
  if (n == 1) return -1.0;

  const auto [lo, hi] = std::minmax_element(
      points.begin(), points.end(),
      [](const PolarPoint& a, const PolarPoint& b) { return a.range < b.range; });
  if (lo->range == hi->range) return 1.0;

  const double mean = mean_range(points);
  std::vector<double> z(n);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = points[i].range - mean;
    sum_sq += z[i] * z[i];
  }
  const double count = static_cast<double>(n);

  if (scheme.kind == WeightKind::kUniform) {
    // sum_{i != j} z_i z_j = (sum z)^2 - sum z^2, and W = N (N - 1).
    double sum = 0.0;
    for (double v : z) sum += v;
    const double cross = sum * sum - sum_sq;
    return cross / ((count - 1.0) * sum_sq);
  }

  scheme.validate();
  std::vector<double> az(n);
  std::vector<double> el(n);
  for (std::size_t i = 0; i < n; ++i) {
    az[i] = normalize_azimuth(points[i].azimuth);
    el[i] = points[i].elevation;
  }
  const PairSums sums = inverse_angular_sums(az, el, z, scheme.min_angular_separation);
  return count / sums.weight * (sums.cross / sum_sq);
}

double intensity_multiplier(std::span<const PolarPoint> points,
                            const IntensityParams& params) {
  if (points.empty()) throw EmptySetError();
  double sum = 0.0;
  for (const auto& p : points) sum += p.intensity;
  const double mean = sum / static_cast<double>(points.size());
  const double deficit = std::max(0.0, params.gamma_ref - mean);
  return std::exp(params.k * deficit / params.gamma_ref);
}

CellScore weighted_cell_score(std::span<const PolarPoint> points,
                              const WeightScheme& scheme,
                              const IntensityParams& params) {
  CellScore score;
  score.autocorrelation = spatial_autocorrelation(points, scheme);
  score.multiplier = intensity_multiplier(points, params);
  score.count = points.size();
  score.product = score.multiplier * score.autocorrelation;
  return score;
}

double range_variance(std::span<const PolarPoint> points) {
  if (points.empty()) throw EmptySetError();
  const double mean = mean_range(points);
  double acc = 0.0;
  for (const auto& p : points) {
    const double d = p.range - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(points.size());
}

}  // namespace pcq
