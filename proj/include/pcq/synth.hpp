// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthetic frames: planar surfaces sampled on the sensor's beam
// lattice, sparse background returns, and three noise injectors (scattered
// interference, occluding low-intensity clusters, attenuation).

#ifndef PCQ_SYNTH_HPP_
#define PCQ_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pcq/frame.hpp"
#include "pcq/grid.hpp"
#include "pcq/io.hpp"
#include "pcq/parallel.hpp"

namespace pcq {

/// Counter-based generator: every draw is a hash of (seed, stream, counter),
/// so a value never depends on how many draws came before it.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform in [0, 1).
  double uniform(std::uint64_t counter) const noexcept;
  double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(counter);
  }
  /// Standard normal from counters (2*counter, 2*counter + 1).
  double normal(std::uint64_t counter) const noexcept;

 private:
  std::uint64_t key_;
};

/// Mixes values into a derived seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

/// A planar patch facing the sensor. Its range is `range` along the patch's
/// center ray; yaw and pitch tilt the patch normal away from that ray so the
/// range varies smoothly across it.
struct Surface {
  double azimuth_min = 0.0;
  double azimuth_max = 0.0;
  double elevation_min = 0.0;
  double elevation_max = 0.0;
  double range = 20.0;
  double range_jitter = 0.05;  ///< sigma, meters
  double intensity_mean = 0.4;
  double intensity_jitter = 0.05;
  double yaw = 0.0;    ///< degrees
  double pitch = 0.0;  ///< degrees
  double return_probability = 1.0;

  bool covers(double azimuth, double elevation) const noexcept;
  /// Range to the plane along a direction, or 0 if the ray misses it.
  double range_along(double azimuth, double elevation) const noexcept;
};

/// Returns for beams that hit no surface.
struct Background {
  double density = 0.0;  ///< probability that an uncovered beam returns
  double range_min = 40.0;
  double range_max = 150.0;
  double intensity_mean = 0.4;
  double intensity_jitter = 0.05;
};

struct SceneSpec {
  SensorProfile profile;
  std::vector<Surface> surfaces;
  Background background;

  void validate() const;
};

/// Samples every beam of the profile's m x n lattice. Only beams that return
/// produce points, in row-major beam order.
FrameRecord generate_scene(const SceneSpec& spec, std::uint64_t seed);

struct ScatteredNoise {
  std::size_t count = 0;
  double intensity_min = 0.0;
  double intensity_max = 0.05;
  double range_min = 1.0;
  double range_max = 120.0;
};

/// A compact blob of weak returns at one range. With `occlude` set, existing
/// returns inside the blob's angular footprint are removed first.
struct ClusteredNoise {
  double azimuth = 0.0;
  double elevation = 0.0;
  double radius = 5.0;  ///< degrees
  double range = 8.0;
  double range_jitter = 0.5;
  std::size_t count = 0;
  double intensity_cap = 0.02;
  bool occlude = true;
};

/// Drops each return with probability 1 - keep_fraction and scales the
/// intensity of the survivors.
struct AttenuationNoise {
  double keep_fraction = 1.0;
  double intensity_scale = 1.0;
};

struct NoiseSpec {
  std::variant<ScatteredNoise, ClusteredNoise, AttenuationNoise> variant;
  std::uint64_t seed = 0;

  void validate() const;
};

FrameRecord inject_noise(const FrameRecord& frame, const NoiseSpec& noise,
                         const SensorProfile& profile);

/// Built-in scenes. Throws ConfigError for any other name.
///
///   empty     no returns
///   wall      tilted facade filling the view at about 20 m
///   street    the same facade over the lower 60% of the view, sky above
///   roadside  facade over the first half of the azimuth span, sparse far
///             returns elsewhere
SceneSpec named_scene(std::string_view name, const SensorProfile& profile);

struct ScenarioSegment {
  double duration_s = 0.0;
  std::string scene;
  std::vector<NoiseSpec> noise;  ///< applied in order
  std::uint64_t seed = 0;
};

struct ScenarioScript {
  SensorProfile profile;
  double rate_hz = 10.0;
  std::vector<ScenarioSegment> segments;

  std::size_t frame_count() const noexcept;
  /// Segment index owning a frame.
  std::size_t segment_of(std::size_t frame_index) const;
};

/// Parses the line-oriented scenario format:
///
///   profile lidar2
///   resolution 64 256       # optional beam-lattice override (m n)
///   rate 10                 # optional, frames per second
///   # duration scene noise [key=value ...]
///   10 wall none seed=1
///   10 wall scattered count=5000 seed=2
///   10 roadside clustered az=35 el=0 radius=22 count=140 seed=3
///
/// Noise may chain variants with '+', e.g. "attenuation+clustered".
ScenarioScript parse_scenario(std::string_view text);

/// Frame `index` of a scenario, generated on demand.
FrameRecord scenario_frame(const ScenarioScript& script, std::size_t index,
                           std::uint64_t seed);

/// Lazily generated scenario frames.
class ScenarioSource : public FrameSource {
 public:
  ScenarioSource(ScenarioScript script, std::uint64_t seed)
      : script_(std::move(script)), seed_(seed) {}
  std::size_t size() const override { return script_.frame_count(); }
  std::uint64_t frame_id(std::size_t index) const override { return index; }
  FrameRecord load(std::size_t index) const override {
    return scenario_frame(script_, index, seed_);
  }
  const ScenarioScript& script() const noexcept { return script_; }

 private:
  ScenarioScript script_;
  std::uint64_t seed_;
};

enum class FrameFormat { kBinary, kText };

/// Writes every frame of the scenario plus a manifest into `out_dir`.
DatasetManifest generate_dataset(const ScenarioScript& script,
                                 const std::filesystem::path& out_dir, std::uint64_t seed,
                                 FrameFormat format = FrameFormat::kBinary);

}  // namespace pcq

#endif  // PCQ_SYNTH_HPP_
