// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcq/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "pcq/errors.hpp"

namespace pcq {

namespace fs = std::filesystem;

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), r.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

// "# key=value" -> (key, value); anything else -> nullopt.
std::optional<std::pair<std::string_view, std::string_view>> pragma(std::string_view line) {
  line.remove_prefix(1);  // '#'
  line = trim(line);
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  const auto key = trim(line.substr(0, eq));
  if (key.empty() || key.find(' ') != std::string_view::npos) return std::nullopt;
  return std::make_pair(key, trim(line.substr(eq + 1)));
}

}  // namespace

FrameRecord read_frame_text(std::string_view text) {
  FrameRecord frame;
  double scale = 255.0;
  bool header_seen = false;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;

    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto kv = pragma(line);
      if (!kv) continue;
      const auto [key, value] = *kv;
      if (key == "scale") {
        if (!frame.points.empty()) {
          throw ParseError(line_no, "scale pragma must precede data rows");
        }
        if (!parse_number(value, scale) || !(scale > 0.0) || !std::isfinite(scale)) {
          throw ParseError(line_no, "scale must be a positive number");
        }
      } else if (key == "frame_id") {
        if (!parse_number(value, frame.frame_id)) {
          throw ParseError(line_no, "frame_id must be a non-negative integer");
        }
      } else if (key == "timestamp_us") {
        if (!parse_number(value, frame.timestamp_us)) {
          throw ParseError(line_no, "timestamp_us must be an integer");
        }
      }
      continue;
    }

    if (!header_seen) {
      if (line != kTextHeader) {
        throw ParseError(line_no, "expected header '" + std::string(kTextHeader) + "'");
      }
      header_seen = true;
      continue;
    }

    std::array<double, 4> f{};
    std::size_t field = 0;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      const auto token = line.substr(start, comma == std::string_view::npos
                                                ? std::string_view::npos
                                                : comma - start);
      if (field >= f.size()) throw ParseError(line_no, "expected 4 fields");
      if (!parse_number(token, f[field]) || !std::isfinite(f[field])) {
        throw ParseError(line_no, "field " + std::to_string(field + 1) +
                                      " is not a finite number: '" + std::string(token) + "'");
      }
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != f.size()) throw ParseError(line_no, "expected 4 fields");

    const auto [range, azimuth, elevation, raw] = f;
    if (range < 0.0) throw RangeError(line_no, "negative range");
    if (raw < 0.0 || raw > scale) {
      throw RangeError(line_no, "intensity " + format_double(raw) + " outside [0, " +
                                    format_double(scale) + "]");
    }
    frame.points.emplace_back(range, azimuth, elevation, raw / scale);
  }
  return frame;
}

std::string write_frame_text(const FrameRecord& frame) {
  std::string out;
  out.reserve(64 + frame.points.size() * 40);
  out += "# scale=1\n# frame_id=" + std::to_string(frame.frame_id) +
         "\n# timestamp_us=" + std::to_string(frame.timestamp_us) + "\n";
  out += kTextHeader;
  out += '\n';
  for (const auto& p : frame.points) {
    out += format_double(p.range);
    out += ',';
    out += format_double(p.azimuth);
    out += ',';
    out += format_double(p.elevation);
    out += ',';
    out += format_double(p.intensity);
    out += '\n';
  }
  return out;
}

namespace {

template <typename T>
T load_le(const std::byte* src) {
  std::array<std::byte, sizeof(T)> raw;
  std::memcpy(raw.data(), src, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  return std::bit_cast<T>(raw);
}

template <typename T>
void store_le(std::vector<std::byte>& out, T value) {
  auto raw = std::bit_cast<std::array<std::byte, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.insert(out.end(), raw.begin(), raw.end());
}

constexpr std::array<char, 4> kMagic{'P', 'C', 'Q', '1'};

}  // namespace

FrameRecord read_frame_binary(std::span<const std::byte> bytes) {
  if (bytes.size() < kBinaryHeaderSize) {
    throw TruncationError(kBinaryHeaderSize, bytes.size());
  }
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("bad magic: not a PCQ1 frame");
  }
  const auto version = load_le<std::uint16_t>(bytes.data() + 4);
  if (version != kBinaryVersion) {
    throw FormatError("unsupported version " + std::to_string(version));
  }
  const auto rows = load_le<std::uint32_t>(bytes.data() + 8);
  const auto cols = load_le<std::uint32_t>(bytes.data() + 12);
  const std::size_t slots = static_cast<std::size_t>(rows) * cols;
  const std::size_t expected = kBinaryHeaderSize + slots * kBinaryRecordSize;
  if (bytes.size() < expected) throw TruncationError(expected, bytes.size());
  if (bytes.size() > expected) {
    throw FormatError("payload has " + std::to_string(bytes.size() - expected) +
                      " trailing bytes");
  }

  FrameRecord frame;
  frame.points.reserve(slots);
  const std::byte* rec = bytes.data() + kBinaryHeaderSize;
  for (std::size_t i = 0; i < slots; ++i, rec += kBinaryRecordSize) {
    const float range = load_le<float>(rec);
    const float az = load_le<float>(rec + 4);
    const float el = load_le<float>(rec + 8);
    const float in = load_le<float>(rec + 12);
    if (!std::isfinite(range) || range < 0.0f || !std::isfinite(az) || !std::isfinite(el)) {
      throw FormatError("slot " + std::to_string(i) + " holds a non-finite or negative value");
    }
    if (!(in >= 0.0f && in <= 1.0f)) {
      throw FormatError("slot " + std::to_string(i) + " intensity outside [0, 1]");
    }
    frame.points.emplace_back(range, az, el, in);
  }
  return frame;
}

std::vector<std::byte> write_frame_binary(const FrameRecord& frame, std::uint32_t rows,
                                          std::uint32_t cols) {
  const std::size_t slots = static_cast<std::size_t>(rows) * cols;
  if (frame.points.size() > slots) {
    throw ConfigError("frame has " + std::to_string(frame.points.size()) +
                      " points, more than the " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " array holds");
  }
  std::vector<std::byte> out;
  out.reserve(kBinaryHeaderSize + slots * kBinaryRecordSize);
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  store_le<std::uint16_t>(out, kBinaryVersion);
  store_le<std::uint16_t>(out, 0);
  store_le<std::uint32_t>(out, rows);
  store_le<std::uint32_t>(out, cols);

  for (const auto& p : frame.points) {
    const float range = static_cast<float>(p.range);
    if (range == 0.0f) {
      for (int k = 0; k < 4; ++k) store_le<float>(out, 0.0f);
      continue;
    }
    float az = static_cast<float>(p.azimuth);
    if (az >= 360.0f || az < 0.0f) az = 0.0f;
    store_le<float>(out, range);
    store_le<float>(out, az);
    store_le<float>(out, static_cast<float>(p.elevation));
    store_le<float>(out, static_cast<float>(p.intensity));
  }
  out.resize(kBinaryHeaderSize + slots * kBinaryRecordSize, std::byte{0});
  return out;
}

std::vector<std::byte> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

void write_file(const fs::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_file(const fs::path& path, std::string_view text) {
  write_file(path, std::as_bytes(std::span(text.data(), text.size())));
}

std::optional<std::uint64_t> frame_id_from_filename(std::string_view name) {
  constexpr std::string_view prefix = "frame_";
  if (!name.starts_with(prefix)) return std::nullopt;
  if (!name.ends_with(".pcq") && !name.ends_with(".csv")) return std::nullopt;
  const auto digits = name.substr(prefix.size(), name.size() - prefix.size() - 4);
  if (digits.empty()) return std::nullopt;
  std::uint64_t id = 0;
  const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), id);
  if (r.ec != std::errc{} || r.ptr != digits.data() + digits.size()) return std::nullopt;
  return id;
}

FrameRecord load_frame_file(const fs::path& path) {
  const auto bytes = read_file(path);
  const auto ext = path.extension().string();
  FrameRecord frame;
  if (ext == ".pcq") {
    frame = read_frame_binary(bytes);
    if (auto id = frame_id_from_filename(path.filename().string())) frame.frame_id = *id;
  } else if (ext == ".csv") {
    frame = read_frame_text(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } else {
    throw FormatError(path.string() + ": unknown frame file extension '" + ext + "'");
  }
  return frame;
}

namespace {

struct ManifestFile {
  std::string profile;
  std::optional<double> rate_hz;
  std::map<std::uint64_t, std::pair<std::int64_t, std::string>> frames;
};

ManifestFile parse_manifest(const fs::path& path) {
  const auto bytes = read_file(path);
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  ManifestFile m;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool table = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line == "frame_id,timestamp_us,file") {
      table = true;
      continue;
    }
    if (!table) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "manifest: expected key=value");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key == "profile") {
        m.profile = std::string(value);
      } else if (key == "rate_hz") {
        double r = 0;
        if (!parse_number(value, r) || !(r > 0.0)) throw ParseError(line_no, "manifest: bad rate_hz");
        m.rate_hz = r;
      }
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    std::uint64_t id = 0;
    std::int64_t ts = 0;
    if (c2 == std::string_view::npos || !parse_number(line.substr(0, c1), id) ||
        !parse_number(line.substr(c1 + 1, c2 - c1 - 1), ts)) {
      throw ParseError(line_no, "manifest: expected frame_id,timestamp_us,file");
    }
    if (!m.frames.emplace(id, std::make_pair(ts, std::string(trim(line.substr(c2 + 1))))).second) {
      throw DuplicateFrameIdError("manifest lists frame_id " + std::to_string(id) + " twice");
    }
  }
  return m;
}

}  // namespace

DatasetManifest scan_dataset(const fs::path& directory) {
  if (!fs::is_directory(directory)) {
    throw IoError("not a directory: " + directory.string());
  }
  DatasetManifest manifest;
  std::map<std::uint64_t, fs::path> found;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const auto id = frame_id_from_filename(name);
    if (!id) continue;
    auto [it, inserted] = found.emplace(*id, entry.path());
    if (!inserted) {
      throw DuplicateFrameIdError("frame_id " + std::to_string(*id) + " appears in both " +
                                  it->second.filename().string() + " and " + name);
    }
  }
  if (found.empty()) throw EmptyDatasetError("no frame files in " + directory.string());

  ManifestFile listed;
  const auto manifest_path = directory / kManifestName;
  if (fs::exists(manifest_path)) {
    listed = parse_manifest(manifest_path);
    for (const auto& [id, entry] : listed.frames) {
      if (!found.contains(id)) {
        throw IoError("manifest lists frame " + std::to_string(id) + " (" + entry.second +
                      ") but the file is missing");
      }
    }
  }
  manifest.profile = listed.profile;
  if (listed.rate_hz) manifest.rate_hz = *listed.rate_hz;

  const double period_us = 1e6 / manifest.rate_hz;
  for (const auto& [id, path] : found) {
    DatasetEntry e;
    e.frame_id = id;
    e.path = path;
    const auto it = listed.frames.find(id);
    e.timestamp_us = it != listed.frames.end()
                         ? it->second.first
                         : static_cast<std::int64_t>(std::llround(id * period_us));
    if (!manifest.frames.empty() && e.timestamp_us < manifest.frames.back().timestamp_us) {
      throw FormatError("timestamps decrease at frame " + std::to_string(id));
    }
    manifest.frames.push_back(std::move(e));
  }
  return manifest;
}

void write_manifest(const fs::path& directory, const DatasetManifest& manifest) {
  std::ostringstream out;
  out << "# pcq dataset manifest\n";
  if (!manifest.profile.empty()) out << "profile=" << manifest.profile << '\n';
  out << "rate_hz=" << format_double(manifest.rate_hz) << '\n';
  out << "frame_id,timestamp_us,file\n";
  for (const auto& f : manifest.frames) {
    out << f.frame_id << ',' << f.timestamp_us << ',' << f.path.filename().string() << '\n';
  }
  write_file(directory / kManifestName, out.str());
}

FrameRecord DatasetSource::load(std::size_t index) const {
  const auto& entry = manifest_.frames.at(index);
  FrameRecord frame = load_frame_file(entry.path);
  frame.frame_id = entry.frame_id;
  frame.timestamp_us = entry.timestamp_us;
  return frame;
}

}  // namespace pcq
