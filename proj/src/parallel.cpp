// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcq/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <condition_variable>
#include <deque>
#include <exception>
#include <future>
#include <latch>
#include <mutex>
#include <thread>

#include "pcq/errors.hpp"

namespace pcq {

std::size_t ExecPolicy::resolved_workers() const noexcept {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

ExecPolicy ExecPolicy::parse(std::string_view text) {
  ExecPolicy policy;
  if (text == "auto") return policy;
  std::size_t n = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), n);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size() || n == 0) {
    throw ConfigError("workers must be 'auto' or a positive integer, got '" +
                      std::string(text) + "'");
  }
  policy.workers = n;
  return policy;
}

struct CellEngine::Pool {
  std::mutex mutex;
  std::condition_variable wake;
  std::deque<std::function<void()>> queue;
  bool stopping = false;
  std::vector<std::jthread> threads;  // last member: joined first

  explicit Pool(std::size_t n) {
    threads.reserve(n);
    for (std::size_t i = 0; i < n; ++i) threads.emplace_back([this] { run(); });
  }

  ~Pool() {
    {
      std::lock_guard lock(mutex);
      stopping = true;
    }
    wake.notify_all();
  }

  void submit(std::function<void()> task) {
    {
      std::lock_guard lock(mutex);
      queue.push_back(std::move(task));
    }
    wake.notify_one();
  }

  void run() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mutex);
        wake.wait(lock, [this] { return stopping || !queue.empty(); });
        if (queue.empty()) return;
        task = std::move(queue.front());
        queue.pop_front();
      }
      task();
    }
  }
};

CellEngine::CellEngine(ExecPolicy policy)
    : policy_(policy), workers_(policy.resolved_workers()) {
  if (policy_.cells_per_task == 0) {
    throw ConfigError("cells_per_task must be at least 1");
  }
  if (workers_ > 1) pool_ = std::make_unique<Pool>(workers_);
}

CellEngine::~CellEngine() = default;

std::vector<std::optional<CellScore>> CellEngine::map_cells(const FrameGrid& grid,
                                                            const CellFunction& fn) const {
  const std::size_t cells = grid.cell_count();
  std::vector<std::optional<CellScore>> out(cells);
  std::vector<std::exception_ptr> errors(cells);

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto pts = grid.cell(i);
      if (pts.empty()) continue;
      try {
        out[i] = fn(pts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t chunk = policy_.cells_per_task;
  const std::size_t chunks = (cells + chunk - 1) / chunk;
  if (!pool_ || chunks <= 1) {
    run_range(0, cells);
  } else {
    std::atomic<std::size_t> next{0};
    const std::size_t runners = std::min(workers_, chunks);
    std::latch done(static_cast<std::ptrdiff_t>(runners));
    for (std::size_t r = 0; r < runners; ++r) {
      pool_->submit([&] {
        for (;;) {
          const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
          if (c >= chunks) break;
          run_range(c * chunk, std::min(cells, (c + 1) * chunk));
        }
        done.count_down();
      });
    }
    done.wait();
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

FrameReport score_frame(const FrameRecord& frame, const StreamConfig& config,
                        const CellEngine& engine) {
  const FrameGrid grid = project_frame(frame.points, config.profile, config.grid);
  FrameReport report;
  report.score = frame_score(grid, config.scheme, config.params, &engine);
  report.score.frame_id = frame.frame_id;
  report.timestamp_us = frame.timestamp_us;
  report.unweighted = report.score.unweighted();
  report.mean_range_variance = mean_range_variance(grid);
  return report;
}

namespace {

using Loaded = std::variant<FrameRecord, StreamError>;

Loaded load_guarded(const FrameSource& source, std::size_t index) {
  try {
    return source.load(index);
  } catch (const std::exception& e) {
    return StreamError{e.what()};
  }
}

}  // namespace

void score_stream(const FrameSource& source, const StreamConfig& config,
                  const CellEngine& engine,
                  const std::function<void(const StreamItem&)>& sink) {
  if (config.cadence == 0) throw ConfigError("cadence must be at least 1");
  config.scheme.validate();
  config.params.validate();
  config.profile.validate();
  config.grid.validate();

  const std::size_t total = source.size();
  if (total == 0) return;

  std::future<Loaded> pending =
      std::async(std::launch::async, load_guarded, std::cref(source), std::size_t{0});
  for (std::size_t index = 0; index < total; index += config.cadence) {
    Loaded loaded = pending.get();
    const std::size_t next = index + config.cadence;
    if (next < total) {
      pending = std::async(std::launch::async, load_guarded, std::cref(source), next);
    }

    StreamItem item;
    item.index = index;
    item.frame_id = source.frame_id(index);
    if (auto* err = std::get_if<StreamError>(&loaded)) {
      item.result = std::move(*err);
    } else {
      try {
        item.result = score_frame(std::get<FrameRecord>(loaded), config, engine);
      } catch (const std::exception& e) {
        item.result = StreamError{e.what()};
      }
    }
    sink(item);
  }
}

std::vector<StreamItem> score_stream(const FrameSource& source, const StreamConfig& config,
                                     const CellEngine& engine) {
  std::vector<StreamItem> items;
  score_stream(source, config, engine, [&](const StreamItem& item) { items.push_back(item); });
  return items;
}

}  // namespace pcq
