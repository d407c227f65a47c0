// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Frame and dataset I/O.
//
// Text frames (.csv) are meant to be written by hand:
//
//   # scale=255
//   # frame_id=7            (optional)
//   # timestamp_us=700000   (optional)
//   range_m,azimuth_deg,elevation_deg,intensity_raw
//   12.5,45.0,-3.0,128
//
// Raw intensities are divided by the declared scale (default 255).
//
// Binary frames (.pcq) mirror the sensor's m x n return array. Little-endian:
//
//   offset 0   char[4]  "PCQ1"
//   offset 4   u16      version (1)
//   offset 6   u16      reserved (0)
//   offset 8   u32      m (rows)
//   offset 12  u32      n (cols)
//   offset 16  m*n records of f32 {range, azimuth, elevation, intensity}
//
// A record with range 0 is an empty slot; its other fields are zero.

#ifndef PCQ_IO_HPP_
#define PCQ_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcq/frame.hpp"
#include "pcq/parallel.hpp"

namespace pcq {

inline constexpr std::size_t kBinaryHeaderSize = 16;
inline constexpr std::size_t kBinaryRecordSize = 16;
inline constexpr std::uint16_t kBinaryVersion = 1;
inline constexpr std::string_view kTextHeader = "range_m,azimuth_deg,elevation_deg,intensity_raw";

FrameRecord read_frame_text(std::string_view text);

/// Canonical text form: scale=1, shortest round-trip decimal for every field.
std::string write_frame_text(const FrameRecord& frame);

/// Reads every slot, sentinels included.
FrameRecord read_frame_binary(std::span<const std::byte> bytes);

/// Writes the points into an m x n array in order, padding the tail with
/// sentinel slots. Throws ConfigError if the frame has more than m*n points.
std::vector<std::byte> write_frame_binary(const FrameRecord& frame, std::uint32_t rows,
                                          std::uint32_t cols);

/// Loads a .csv or .pcq frame from disk.
FrameRecord load_frame_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes);
void write_file(const std::filesystem::path& path, std::string_view text);
std::vector<std::byte> read_file(const std::filesystem::path& path);

struct DatasetEntry {
  std::uint64_t frame_id = 0;
  std::int64_t timestamp_us = 0;
  std::filesystem::path path;
};

struct DatasetManifest {
  std::string profile;  ///< empty when no manifest file names one
  double rate_hz = 10.0;
  std::vector<DatasetEntry> frames;  ///< ascending frame_id
};

inline constexpr std::string_view kManifestName = "manifest";

/// Parses the frame id out of "frame_<id>.pcq" / "frame_<id>.csv".
std::optional<std::uint64_t> frame_id_from_filename(std::string_view filename);

/// Lists frame files in a directory, sorted by frame id. If a `manifest`
/// file is present its profile, rate and timestamps are used; otherwise
/// timestamps are frame_id / rate.
DatasetManifest scan_dataset(const std::filesystem::path& directory);

/// Writes the `manifest` file for a dataset directory.
void write_manifest(const std::filesystem::path& directory, const DatasetManifest& manifest);

/// Frames of a scanned dataset, loaded lazily. Frame ids and timestamps come
/// from the manifest and override whatever the file says.
class DatasetSource : public FrameSource {
 public:
  explicit DatasetSource(DatasetManifest manifest) : manifest_(std::move(manifest)) {}
  std::size_t size() const override { return manifest_.frames.size(); }
  std::uint64_t frame_id(std::size_t index) const override {
    return manifest_.frames.at(index).frame_id;
  }
  FrameRecord load(std::size_t index) const override;
  const DatasetManifest& manifest() const noexcept { return manifest_; }

 private:
  DatasetManifest manifest_;
};

/// Frames held in memory.
class MemorySource : public FrameSource {
 public:
  explicit MemorySource(std::vector<FrameRecord> frames) : frames_(std::move(frames)) {}
  std::size_t size() const override { return frames_.size(); }
  std::uint64_t frame_id(std::size_t index) const override {
    return frames_.at(index).frame_id;
  }
  FrameRecord load(std::size_t index) const override { return frames_.at(index); }

 private:
  std::vector<FrameRecord> frames_;
};

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

}  // namespace pcq

#endif  // PCQ_IO_HPP_
