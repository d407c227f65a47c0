// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcq/synth.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

#include "pcq/errors.hpp"

namespace pcq {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr double kDeg = std::numbers::pi / 180.0;

// Stream ids. One per kind of draw so adding a draw never shifts another.
enum Stream : std::uint64_t {
  kHit = 1,
  kRangeJitter,
  kIntensity,
  kBackgroundHit,
  kBackgroundRange,
  kBackgroundIntensity,
  kNoiseAzimuth,
  kNoiseElevation,
  kNoiseRange,
  kNoiseIntensity,
  kNoiseRadius,
  kNoiseAngle,
  kNoiseKeep,
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix(splitmix(a) ^ (b + 0x632BE59BD9B4E019ull));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix_seed(seed, stream)) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  return splitmix(key_ ^ splitmix(counter));
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const noexcept {
  const double u1 = 1.0 - uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool Surface::covers(double azimuth, double elevation) const noexcept {
  if (elevation < elevation_min || elevation >= elevation_max) return false;
  return normalize_azimuth(azimuth - azimuth_min) < azimuth_max - azimuth_min;
}

double Surface::range_along(double azimuth, double elevation) const noexcept {
  const double center_az = 0.5 * (azimuth_min + azimuth_max);
  const double center_el = 0.5 * (elevation_min + elevation_max);
  auto unit = [](double az, double el) {
    return std::array<double, 3>{std::cos(el * kDeg) * std::cos(az * kDeg),
                                 std::cos(el * kDeg) * std::sin(az * kDeg),
                                 std::sin(el * kDeg)};
  };
  auto dot = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  };
  const auto normal = unit(center_az + yaw, center_el + pitch);
  const double offset = range * dot(normal, unit(center_az, center_el));
  const double facing = dot(normal, unit(azimuth, elevation));
  if (facing <= 0.05 || offset <= 0.0) return 0.0;
  return offset / facing;
}

void SceneSpec::validate() const {
  profile.validate();
  for (const auto& s : surfaces) {
    if (!(s.range > 0.0)) throw ConfigError("surface range must be positive");
    if (!(s.azimuth_max > s.azimuth_min) || s.azimuth_max - s.azimuth_min > 360.0) {
      throw ConfigError("surface azimuth span must be in (0, 360]");
    }
    if (!(s.elevation_max > s.elevation_min)) {
      throw ConfigError("surface elevation span must be positive");
    }
    if (s.range_jitter < 0.0 || s.intensity_jitter < 0.0) {
      throw ConfigError("jitter must be non-negative");
    }
    if (!(s.return_probability >= 0.0 && s.return_probability <= 1.0)) {
      throw ConfigError("return_probability must lie in [0, 1]");
    }
  }
  const auto& b = background;
  if (!(b.density >= 0.0 && b.density <= 1.0)) {
    throw ConfigError("background density must lie in [0, 1]");
  }
  if (b.density > 0.0 && !(b.range_min > 0.0 && b.range_max >= b.range_min)) {
    throw ConfigError("background range must satisfy 0 < min <= max");
  }
}

FrameRecord generate_scene(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto& prof = spec.profile;
  const CounterRng hit(seed, kHit);
  const CounterRng jitter(seed, kRangeJitter);
  const CounterRng shade(seed, kIntensity);
  const CounterRng bg_hit(seed, kBackgroundHit);
  const CounterRng bg_range(seed, kBackgroundRange);
  const CounterRng bg_shade(seed, kBackgroundIntensity);

  FrameRecord frame;
  const double az_step = prof.azimuth_span() / prof.cols;
  const double el_step = prof.elevation_span() / prof.rows;
  for (std::uint32_t i = 0; i < prof.rows; ++i) {
    const double el = prof.elevation_min + (i + 0.5) * el_step;
    for (std::uint32_t j = 0; j < prof.cols; ++j) {
      const double az = prof.azimuth_min + (j + 0.5) * az_step;
      const std::uint64_t beam = static_cast<std::uint64_t>(i) * prof.cols + j;

      const Surface* nearest = nullptr;
      double best = 0.0;
      bool covered = false;
      for (std::size_t s = 0; s < spec.surfaces.size(); ++s) {
        const Surface& surf = spec.surfaces[s];
        if (!surf.covers(az, el)) continue;
        covered = true;
        if (surf.return_probability < 1.0 &&
            hit.uniform(beam * spec.surfaces.size() + s) >= surf.return_probability) {
          continue;
        }
        const double r = surf.range_along(az, el);
        if (r > 0.0 && (nearest == nullptr || r < best)) {
          nearest = &surf;
          best = r;
        }
      }

      if (nearest != nullptr) {
        const double r = std::max(0.01, best + nearest->range_jitter * jitter.normal(beam));
        const double in =
            clamp01(nearest->intensity_mean + nearest->intensity_jitter * shade.normal(beam));
        frame.points.emplace_back(r, az, el, in);
      } else if (!covered && spec.background.density > 0.0 &&
                 bg_hit.uniform(beam) < spec.background.density) {
        const auto& b = spec.background;
        const double r = bg_range.uniform(beam, b.range_min, b.range_max);
        const double in = clamp01(b.intensity_mean + b.intensity_jitter * bg_shade.normal(beam));
        frame.points.emplace_back(r, az, el, in);
      }
    }
  }
  return frame;
}

void NoiseSpec::validate() const {
  if (const auto* s = std::get_if<ScatteredNoise>(&variant)) {
    if (!(s->range_min > 0.0 && s->range_max >= s->range_min)) {
      throw ConfigError("scattered noise range must satisfy 0 < min <= max");
    }
    if (!(s->intensity_min >= 0.0 && s->intensity_max <= 1.0 &&
          s->intensity_min <= s->intensity_max)) {
      throw ConfigError("scattered noise intensity must satisfy 0 <= min <= max <= 1");
    }
  } else if (const auto* c = std::get_if<ClusteredNoise>(&variant)) {
    if (!(c->radius > 0.0)) throw ConfigError("cluster radius must be positive");
    if (!(c->range > 0.0) || c->range_jitter < 0.0) {
      throw ConfigError("cluster range must be positive and jitter non-negative");
    }
    if (!(c->intensity_cap >= 0.0 && c->intensity_cap <= 1.0)) {
      throw ConfigError("cluster intensity cap must lie in [0, 1]");
    }
  } else if (const auto* a = std::get_if<AttenuationNoise>(&variant)) {
    if (!(a->keep_fraction >= 0.0 && a->keep_fraction <= 1.0)) {
      throw ConfigError("keep fraction must lie in [0, 1]");
    }
    if (!(a->intensity_scale >= 0.0)) throw ConfigError("intensity scale must be non-negative");
  }
}

namespace {

FrameRecord apply(const FrameRecord& frame, const ScatteredNoise& n, std::uint64_t seed,
                  const SensorProfile& prof) {
  FrameRecord out = frame;
  const CounterRng az(seed, kNoiseAzimuth);
  const CounterRng el(seed, kNoiseElevation);
  const CounterRng range(seed, kNoiseRange);
  const CounterRng shade(seed, kNoiseIntensity);
  out.points.reserve(out.points.size() + n.count);
  for (std::uint64_t k = 0; k < n.count; ++k) {
    out.points.emplace_back(range.uniform(k, n.range_min, n.range_max),
                            az.uniform(k, prof.azimuth_min, prof.azimuth_max),
                            el.uniform(k, prof.elevation_min, prof.elevation_max),
                            shade.uniform(k, n.intensity_min, n.intensity_max));
  }
  return out;
}

double angular_distance(double az_a, double el_a, double az_b, double el_b) {
  return std::hypot(wrapped_azimuth_delta(az_a, az_b), el_a - el_b);
}

FrameRecord apply(const FrameRecord& frame, const ClusteredNoise& n, std::uint64_t seed,
                  const SensorProfile& prof) {
  FrameRecord out;
  out.frame_id = frame.frame_id;
  out.timestamp_us = frame.timestamp_us;
  out.points.reserve(frame.points.size() + n.count);
  for (const auto& p : frame.points) {
    if (n.occlude && p.valid() &&
        angular_distance(p.azimuth, p.elevation, n.azimuth, n.elevation) < n.radius) {
      continue;
    }
    out.points.push_back(p);
  }

  const CounterRng radius(seed, kNoiseRadius);
  const CounterRng angle(seed, kNoiseAngle);
  const CounterRng range(seed, kNoiseRange);
  const CounterRng shade(seed, kNoiseIntensity);
  const std::uint64_t max_attempts = 64 * static_cast<std::uint64_t>(n.count) + 64;
  std::size_t added = 0;
  for (std::uint64_t k = 0; added < n.count && k < max_attempts; ++k) {
    const double rho = n.radius * std::sqrt(radius.uniform(k));
    const double phi = 2.0 * std::numbers::pi * angle.uniform(k);
    const double az = n.azimuth + rho * std::cos(phi);
    const double el = n.elevation + rho * std::sin(phi);
    if (el < prof.elevation_min || el > prof.elevation_max) continue;
    if (!prof.full_circle() &&
        normalize_azimuth(az - prof.azimuth_min) >= prof.azimuth_span()) {
      continue;
    }
    const double r = std::max(0.01, n.range + n.range_jitter * range.normal(k));
    out.points.emplace_back(r, az, el, shade.uniform(k, 0.0, n.intensity_cap));
    ++added;
  }
  return out;
}

FrameRecord apply(const FrameRecord& frame, const AttenuationNoise& n, std::uint64_t seed,
                  const SensorProfile&) {
  FrameRecord out;
  out.frame_id = frame.frame_id;
  out.timestamp_us = frame.timestamp_us;
  out.points.reserve(frame.points.size());
  const CounterRng keep(seed, kNoiseKeep);
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    PolarPoint p = frame.points[i];
    if (p.valid()) {
      if (keep.uniform(i) >= n.keep_fraction) continue;
      p.intensity = clamp01(p.intensity * n.intensity_scale);
    }
    out.points.push_back(p);
  }
  return out;
}

}  // namespace

FrameRecord inject_noise(const FrameRecord& frame, const NoiseSpec& noise,
                         const SensorProfile& profile) {
  noise.validate();
  return std::visit([&](const auto& n) { return apply(frame, n, noise.seed, profile); },
                    noise.variant);
}

SceneSpec named_scene(std::string_view name, const SensorProfile& profile) {
  SceneSpec spec;
  spec.profile = profile;
  if (name == "empty") return spec;

  // Facets tiling an azimuth interval, each tilted so range varies across it.
  auto facets = [&](double az_begin, double az_end, double range, double yaw,
                    double el_top) {
    const double span = az_end - az_begin;
    const int pieces = std::max(1, static_cast<int>(std::ceil(span / 120.0)));
    for (int k = 0; k < pieces; ++k) {
      Surface s;
      s.azimuth_min = az_begin + span * k / pieces;
      s.azimuth_max = az_begin + span * (k + 1) / pieces;
      s.elevation_min = profile.elevation_min;
      s.elevation_max = el_top;
      s.range = range;
      s.yaw = yaw;
      spec.surfaces.push_back(s);
    }
  };

  const double top = profile.elevation_max + 1e-9;
  if (name == "wall") {
    facets(profile.azimuth_min, profile.azimuth_max, 20.0, -20.0, top);
    return spec;
  }
  if (name == "street") {
    // Facade across the lower 60% of the view, open sky above.
    facets(profile.azimuth_min, profile.azimuth_max, 20.0, -20.0,
           profile.elevation_min + 0.6 * profile.elevation_span());
    return spec;
  }
  if (name == "roadside") {
    // Dense facade over the first half of the view; sparse far returns elsewhere.
    const double mid = 0.5 * (profile.azimuth_min + profile.azimuth_max);
    facets(profile.azimuth_min, mid, 20.0, -10.0, top);
    spec.background.density = 0.004;
    spec.background.range_min = 40.0;
    spec.background.range_max = 150.0;
    return spec;
  }
  throw ConfigError("unknown scene '" + std::string(name) + "' (known: empty, wall, street, roadside)");
}

std::size_t ScenarioScript::frame_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : segments) n += static_cast<std::size_t>(std::llround(s.duration_s * rate_hz));
  return n;
}

std::size_t ScenarioScript::segment_of(std::size_t frame_index) const {
  std::size_t begin = 0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto n = static_cast<std::size_t>(std::llround(segments[s].duration_s * rate_hz));
    if (frame_index < begin + n) return s;
    begin += n;
  }
  throw ConfigError("frame " + std::to_string(frame_index) + " is past the end of the scenario");
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T number(std::string_view s, std::size_t line_no, std::string_view what) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw ParseError(line_no, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

// Sets `key` on a noise variant. Returns false if the variant has no such key.
bool set_param(ScatteredNoise& n, std::string_view key, std::string_view v, std::size_t ln) {
  if (key == "count") n.count = number<std::size_t>(v, ln, key);
  else if (key == "imin") n.intensity_min = number<double>(v, ln, key);
  else if (key == "imax") n.intensity_max = number<double>(v, ln, key);
  else if (key == "rmin") n.range_min = number<double>(v, ln, key);
  else if (key == "rmax") n.range_max = number<double>(v, ln, key);
  else return false;
  return true;
}

bool set_param(ClusteredNoise& n, std::string_view key, std::string_view v, std::size_t ln) {
  if (key == "count") n.count = number<std::size_t>(v, ln, key);
  else if (key == "az") n.azimuth = number<double>(v, ln, key);
  else if (key == "el") n.elevation = number<double>(v, ln, key);
  else if (key == "radius") n.radius = number<double>(v, ln, key);
  else if (key == "range") n.range = number<double>(v, ln, key);
  else if (key == "jitter") n.range_jitter = number<double>(v, ln, key);
  else if (key == "cap") n.intensity_cap = number<double>(v, ln, key);
  else if (key == "occlude") n.occlude = number<int>(v, ln, key) != 0;
  else return false;
  return true;
}

bool set_param(AttenuationNoise& n, std::string_view key, std::string_view v, std::size_t ln) {
  if (key == "keep") n.keep_fraction = number<double>(v, ln, key);
  else if (key == "scale") n.intensity_scale = number<double>(v, ln, key);
  else return false;
  return true;
}

NoiseSpec noise_named(std::string_view name, std::size_t ln) {
  NoiseSpec spec;
  if (name == "scattered") spec.variant = ScatteredNoise{};
  else if (name == "clustered") spec.variant = ClusteredNoise{};
  else if (name == "attenuation") spec.variant = AttenuationNoise{};
  else throw ParseError(ln, "unknown noise '" + std::string(name) + "'");
  return spec;
}

std::string_view noise_name(const NoiseSpec& n) {
  switch (n.variant.index()) {
    case 0: return "scattered";
    case 1: return "clustered";
    default: return "attenuation";
  }
}

}  // namespace

ScenarioScript parse_scenario(std::string_view text) {
  ScenarioScript script;
  std::optional<SensorProfile> profile;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> resolution;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (tok[0] == "profile") {
      if (tok.size() != 2) throw ParseError(line_no, "usage: profile <name>");
      profile = builtin_profile(tok[1]);
      continue;
    }
    if (tok[0] == "resolution") {
      if (tok.size() != 3) throw ParseError(line_no, "usage: resolution <m> <n>");
      resolution = {number<std::uint32_t>(tok[1], line_no, "rows"),
                    number<std::uint32_t>(tok[2], line_no, "cols")};
      continue;
    }
    if (tok[0] == "rate") {
      if (tok.size() != 2) throw ParseError(line_no, "usage: rate <hz>");
      script.rate_hz = number<double>(tok[1], line_no, "rate");
      if (!(script.rate_hz > 0.0)) throw ParseError(line_no, "rate must be positive");
      continue;
    }

    if (tok.size() < 3) throw ParseError(line_no, "expected: <duration> <scene> <noise> [key=value ...]");
    ScenarioSegment seg;
    seg.duration_s = number<double>(tok[0], line_no, "duration");
    if (!(seg.duration_s > 0.0)) throw ParseError(line_no, "duration must be positive");
    seg.scene = std::string(tok[1]);
    if (tok[2] != "none") {
      std::string_view chain = tok[2];
      while (!chain.empty()) {
        const auto plus = chain.find('+');
        seg.noise.push_back(noise_named(chain.substr(0, plus), line_no));
        chain = plus == std::string_view::npos ? std::string_view{} : chain.substr(plus + 1);
      }
    }
    for (std::size_t t = 3; t < tok.size(); ++t) {
      const auto eq = tok[t].find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value, got '" + std::string(tok[t]) + "'");
      auto key = tok[t].substr(0, eq);
      const auto value = tok[t].substr(eq + 1);
      if (key == "seed") {
        seg.seed = number<std::uint64_t>(value, line_no, "seed");
        continue;
      }
      // "clustered.count=..." targets one variant of a chain.
      std::string_view only;
      if (const auto dot = key.find('.'); dot != std::string_view::npos) {
        only = key.substr(0, dot);
        key = key.substr(dot + 1);
      }
      bool used = false;
      for (auto& n : seg.noise) {
        if (!only.empty() && noise_name(n) != only) continue;
        used |= std::visit([&](auto& v) { return set_param(v, key, value, line_no); }, n.variant);
      }
      if (!used) throw ParseError(line_no, "no noise in this segment takes '" + std::string(tok[t]) + "'");
    }
    script.segments.push_back(std::move(seg));
  }

  if (!profile) throw ConfigError("scenario must name a profile");
  if (resolution) {
    profile->rows = resolution->first;
    profile->cols = resolution->second;
  }
  profile->validate();
  script.profile = *profile;
  if (script.segments.empty()) throw ConfigError("scenario has no segments");
  for (const auto& seg : script.segments) {
    named_scene(seg.scene, script.profile);
    for (const auto& n : seg.noise) n.validate();
  }
  return script;
}

FrameRecord scenario_frame(const ScenarioScript& script, std::size_t index, std::uint64_t seed) {
  const auto& seg = script.segments[script.segment_of(index)];
  const std::uint64_t frame_seed = mix_seed(mix_seed(seed, seg.seed), index);
  FrameRecord frame = generate_scene(named_scene(seg.scene, script.profile), frame_seed);
  for (std::size_t k = 0; k < seg.noise.size(); ++k) {
    NoiseSpec n = seg.noise[k];
    n.seed = mix_seed(frame_seed, k + 1);
    frame = inject_noise(frame, n, script.profile);
  }
  frame.frame_id = index;
  frame.timestamp_us = std::llround(static_cast<double>(index) * 1e6 / script.rate_hz);
  return frame;
}

DatasetManifest generate_dataset(const ScenarioScript& script,
                                 const std::filesystem::path& out_dir, std::uint64_t seed,
                                 FrameFormat format) {
  if (script.segments.empty()) throw ConfigError("scenario has no segments");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  DatasetManifest manifest;
  manifest.profile = script.profile.name;
  manifest.rate_hz = script.rate_hz;
  const std::size_t total = script.frame_count();
  for (std::size_t i = 0; i < total; ++i) {
    const FrameRecord frame = scenario_frame(script, i, seed);
    DatasetEntry entry;
    entry.frame_id = frame.frame_id;
    entry.timestamp_us = frame.timestamp_us;
    if (format == FrameFormat::kBinary) {
      const std::uint32_t rows = script.profile.rows;
      const auto needed = static_cast<std::uint32_t>((frame.points.size() + rows - 1) / rows);
      const std::uint32_t cols = std::max(script.profile.cols, needed);
      entry.path = out_dir / ("frame_" + std::to_string(i) + ".pcq");
      write_file(entry.path, write_frame_binary(frame, rows, cols));
    } else {
      entry.path = out_dir / ("frame_" + std::to_string(i) + ".csv");
      write_file(entry.path, write_frame_text(frame));
    }
    manifest.frames.push_back(std::move(entry));
  }
  write_manifest(out_dir, manifest);
  return manifest;
}

}  // namespace pcq
