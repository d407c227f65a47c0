// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0
//
// pcq: score lidar frames for point-cloud quality, sweep thresholds over
// labeled scores, dump per-cell grids and generate synthetic datasets.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcq/errors.hpp"
#include "pcq/grid.hpp"
#include "pcq/io.hpp"
#include "pcq/parallel.hpp"
#include "pcq/report.hpp"
#include "pcq/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct ScoringFlags {
  std::string profile;
  std::string grid;
  std::string scheme = "inv-angular";
  std::optional<double> gamma_ref;
  double k = 1.0;
  std::string workers = "auto";
};

void add_scoring_flags(CLI::App* cmd, ScoringFlags& f) {
  cmd->add_option("--profile", f.profile, "Sensor profile: lidar1 or lidar2 (default: manifest)");
  cmd->add_option("--grid", f.grid, "Grid as VxH, e.g. 8x32 (default: profile's grid)");
  cmd->add_option("--scheme", f.scheme, "Weight scheme")
      ->check(CLI::IsMember({"uniform", "inv-angular"}))
      ->capture_default_str();
  cmd->add_option("--gamma-ref", f.gamma_ref,
                  "Reference intensity in [0, 1] (default: profile's value)");
  cmd->add_option("--k", f.k, "Multiplier exponent, >= 0")->capture_default_str();
  cmd->add_option("--workers", f.workers, "Worker threads: 'auto' or N")
      ->envname("PCQ_WORKERS")
      ->capture_default_str();
}

pcq::StreamConfig make_config(const ScoringFlags& f, const std::string& fallback_profile) {
  const std::string name = f.profile.empty() ? fallback_profile : f.profile;
  if (name.empty()) throw pcq::ConfigError("no sensor profile: pass --profile");
  pcq::StreamConfig config;
  config.profile = pcq::builtin_profile(name);
  if (f.gamma_ref) config.profile.gamma_ref = *f.gamma_ref;
  config.grid = f.grid.empty() ? pcq::GridConfig::for_profile(config.profile)
                               : pcq::parse_grid(f.grid);
  config.scheme = f.scheme == "uniform" ? pcq::WeightScheme::uniform()
                                        : pcq::WeightScheme::inverse_angular();
  config.params.gamma_ref = config.profile.gamma_ref;
  config.params.k = f.k;
  config.scheme.validate();
  config.params.validate();
  config.grid.validate();
  return config;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    pcq::write_file(out_path, text);
  }
}

int cmd_score(const std::string& input, const ScoringFlags& flags, std::size_t cadence,
              const std::string& out_path) {
  std::unique_ptr<pcq::FrameSource> source;
  std::string manifest_profile;
  if (fs::is_directory(input)) {
    auto manifest = pcq::scan_dataset(input);
    manifest_profile = manifest.profile;
    source = std::make_unique<pcq::DatasetSource>(std::move(manifest));
  } else {
    source = std::make_unique<pcq::MemorySource>(
        std::vector<pcq::FrameRecord>{pcq::load_frame_file(input)});
  }

  pcq::StreamConfig config = make_config(flags, manifest_profile);
  config.cadence = cadence;
  const pcq::CellEngine engine(pcq::ExecPolicy::parse(flags.workers));

  pcq::ScoreSeries series;
  int failures = 0;
  pcq::score_stream(*source, config, engine, [&](const pcq::StreamItem& item) {
    if (item.ok()) {
      series.append(pcq::to_row(item.report()));
    } else {
      ++failures;
      std::cerr << "pcq: frame " << item.frame_id << ": "
                << std::get<pcq::StreamError>(item.result).message << '\n';
    }
  });
  emit(out_path, pcq::write_score_csv(series));
  return failures == 0 ? 0 : kDataError;
}

int cmd_report(const std::string& scores_path, const std::string& labels_path,
               std::vector<double> thresholds, const std::string& cdf_path,
               const std::string& out_path) {
  const auto as_text = [](const std::string& p) {
    const auto bytes = pcq::read_file(p);
    return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  };
  const auto series = pcq::read_score_csv(as_text(scores_path));
  const auto labels = pcq::read_labels_csv(as_text(labels_path));
  if (thresholds.empty()) thresholds = pcq::default_thresholds();
  const auto report = pcq::threshold_report(series, labels, std::move(thresholds));
  if (!cdf_path.empty()) {
    const auto cdf = pcq::score_cdf(series, labels);
    pcq::write_file(cdf_path, pcq::write_cdf_csv(cdf));
  }
  emit(out_path, pcq::write_threshold_csv(report));
  return 0;
}

int cmd_grid_dump(const std::string& frame_path, const ScoringFlags& flags,
                  double flag_threshold, const std::string& out_path) {
  const pcq::FrameRecord frame = pcq::load_frame_file(frame_path);
  const pcq::StreamConfig config = make_config(flags, "");
  const pcq::CellEngine engine(pcq::ExecPolicy::parse(flags.workers));
  const pcq::FrameGrid grid = pcq::project_frame(frame.points, config.profile, config.grid);
  const pcq::FrameScore score = pcq::frame_score(grid, config.scheme, config.params, &engine);
  emit(out_path, pcq::write_grid_csv(score, grid, flag_threshold));
  return 0;
}

int cmd_generate(const std::string& script_path, const std::string& out_dir,
                 std::uint64_t seed, const std::string& format) {
  const auto bytes = pcq::read_file(script_path);
  const auto script = pcq::parse_scenario(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  const auto manifest = pcq::generate_dataset(
      script, out_dir, seed, format == "text" ? pcq::FrameFormat::kText : pcq::FrameFormat::kBinary);
  std::cerr << "pcq: wrote " << manifest.frames.size() << " frames to " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-cloud quality scoring for lidar frames."};
  app.require_subcommand(1);

  ScoringFlags score_flags;
  std::string score_input;
  std::size_t cadence = 10;
  std::string score_out;
  auto* score = app.add_subcommand(
      "score",
      "Score a frame file or a dataset directory.\n"
      "Output CSV columns: frame_id,timestamp_us,score,unweighted_score,mean_range_variance");
  score->add_option("input", score_input, "Dataset directory or .pcq/.csv frame")->required();
  add_scoring_flags(score, score_flags);
  score->add_option("--cadence", cadence, "Score every Nth frame")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  score->add_option("-o,--out", score_out, "Output file (default: stdout)");

  std::string scores_path;
  std::string labels_path;
  std::vector<double> thresholds;
  std::string cdf_path;
  std::string report_out;
  auto* report = app.add_subcommand(
      "report",
      "Sweep score thresholds over labeled frames.\n"
      "Labels CSV columns: frame_id,label (label is positive or negative)\n"
      "Output CSV columns: threshold,positive_kept_fraction,negative_filtered_fraction,"
      "positive_kept,positive_total,negative_filtered,negative_total\n"
      "A positive is kept when score < threshold; a negative is filtered when score >= "
      "threshold.\n"
      "CDF CSV columns: label,score,cumulative_fraction");
  report->add_option("scores", scores_path, "Score CSV from 'pcq score'")->required();
  report->add_option("labels", labels_path, "Labels CSV")->required();
  report->add_option("--thresholds", thresholds,
                     "Comma-separated thresholds, e.g. --thresholds=-0.4,0,0.4 "
                     "(default: -1 to 1 in steps of 0.1)")
      ->delimiter(',');
  report->add_option("--cdf", cdf_path, "Also write the per-class score CDF here");
  report->add_option("-o,--out", report_out, "Output file (default: stdout)");

  ScoringFlags dump_flags;
  std::string dump_input;
  double flag_threshold = pcq::kDefaultFlagThreshold;
  std::string dump_out;
  auto* dump = app.add_subcommand(
      "grid-dump",
      "Per-cell table for one frame.\n"
      "Output CSV columns: row,col,count,autocorrelation,multiplier,product,status\n"
      "status is empty, flagged (autocorrelation below --flag-threshold) or ok.");
  dump->add_option("frame", dump_input, ".pcq or .csv frame")->required();
  add_scoring_flags(dump, dump_flags);
  dump->add_option("--flag-threshold", flag_threshold,
                   "Flag cells whose autocorrelation is below this. A display aid, not a "
                   "tuned filtering bar")
      ->capture_default_str();
  dump->add_option("-o,--out", dump_out, "Output file (default: stdout)");

  std::string script_path;
  std::string gen_out;
  std::uint64_t seed = 0;
  std::string format = "binary";
  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset from a scenario script.");
  generate->add_option("script", script_path, "Scenario script")->required();
  generate->add_option("-o,--out", gen_out, "Output directory")->required();
  generate->add_option("--seed", seed, "Random seed")->capture_default_str();
  generate->add_option("--format", format, "Frame format")
      ->check(CLI::IsMember({"binary", "text"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*score) return cmd_score(score_input, score_flags, cadence, score_out);
    if (*report) return cmd_report(scores_path, labels_path, thresholds, cdf_path, report_out);
    if (*dump) return cmd_grid_dump(dump_input, dump_flags, flag_threshold, dump_out);
    if (*generate) return cmd_generate(script_path, gen_out, seed, format);
  } catch (const pcq::ConfigError& e) {
    std::cerr << "pcq: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "pcq: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
