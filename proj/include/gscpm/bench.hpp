#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "gscpm/gscpm.hpp"
#include "gscpm/hex.hpp"
#include "gscpm/schedulers.hpp"

namespace gscpm {

enum class RowKind { Game, Mean, Stddev };

struct BenchRecord {
  SchedulerKind scheduler = SchedulerKind::Sequential;
  std::size_t n_workers = 1;
  std::uint64_t n_tasks = 1;
  std::uint64_t n_playouts = 0;
  std::size_t board_size = 0;
  RowKind kind = RowKind::Game;
  std::size_t game_index = 0;  // meaningful for RowKind::Game only
  double wall_time = 0.0;      // seconds
  double speedup = 0.0;        // baseline mean time / wall_time

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct SweepSpec {
  std::vector<SchedulerKind> schedulers{SchedulerKind::FifoPool};
  std::vector<std::size_t> workers{default_worker_count()};
  std::vector<std::uint64_t> tasks{1};
  std::uint64_t playouts = std::uint64_t{1} << 17;
  std::size_t board_size = 11;
  double cp = 1.0;
  std::size_t games = 10;
  std::size_t warmup = 1;
  std::uint64_t seed = 1;
  bool verify = false;

  void validate() const {
    if (playouts == 0) throw std::invalid_argument("sweep: playouts must be >= 1");
    if (games == 0) throw std::invalid_argument("sweep: games must be >= 1");
    if (board_size == 0) throw std::invalid_argument("sweep: board size must be >= 1");
    if (!(cp >= 0.0)) throw std::invalid_argument("sweep: cp must be >= 0");
    if (schedulers.empty() || workers.empty() || tasks.empty())
      throw std::invalid_argument("sweep: empty scheduler, worker or task list");
    for (auto w : workers)
      if (w == 0) throw std::invalid_argument("sweep: worker counts must be >= 1");
    for (auto t : tasks)
      if (t == 0) throw std::invalid_argument("sweep: task counts must be >= 1");
  }
};

// Keeps freed search trees in the process heap instead of returning them to
// the OS, so each timed game reuses warm pages rather than page-faulting a
// fresh heap. Call once at startup of a benchmark process.
inline void retain_freed_memory() noexcept {
#if defined(__GLIBC__)
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
#endif
}

inline double sample_mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// One timed first-move search from the empty board. Throws if verification is
// on and the root did not receive exactly the playout budget.
inline double time_first_move(const SearchConfig& config, Scheduler& scheduler, bool verify) {
  const HexBoard board(config.board_size);
  const auto start = std::chrono::steady_clock::now();
  auto result = gscpm_search_tree(board, config, scheduler);
  const auto stop = std::chrono::steady_clock::now();
  if (verify && result.root->visits() != config.n_playouts) {
    throw std::runtime_error("verify: root visits " + std::to_string(result.root->visits()) +
                             " != playouts " + std::to_string(config.n_playouts));
  }
  return std::chrono::duration<double>(stop - start).count();
}

/// Measures every (scheduler, workers, tasks) point of the sweep.
///
/// A sequential one-task baseline is measured first with the same budget.
/// Each configuration gets its own scheduler instance; the first `warmup`
/// games are run and discarded, then `games` games are timed. Output: one row
/// per timed game followed by a mean and a stddev row. Worker counts are swept
/// only for pool back-ends.
inline std::vector<BenchRecord> run_benchmark(
    const SweepSpec& spec, const std::function<void(const BenchRecord&)>& on_record = {}) {
  spec.validate();
  std::vector<BenchRecord> out;
  double baseline = 0.0;

  auto measure = [&](SchedulerKind kind, std::size_t workers, std::uint64_t tasks) {
    auto scheduler = make_scheduler(kind, workers);
    SearchConfig config;
    config.n_playouts = spec.playouts;
    config.n_tasks = tasks;
    config.cp = spec.cp;
    config.board_size = spec.board_size;

    for (std::size_t g = 0; g < spec.warmup; ++g) {
      config.seed = spec.seed + g;
      time_first_move(config, *scheduler, spec.verify);
    }
    std::vector<double> times;
    for (std::size_t g = 0; g < spec.games; ++g) {
      config.seed = spec.seed + spec.warmup + g;
      times.push_back(time_first_move(config, *scheduler, spec.verify));
    }
    const bool is_baseline = baseline == 0.0;
    if (is_baseline) baseline = sample_mean(times);

    BenchRecord row;
    row.scheduler = kind;
    row.n_workers = scheduler->n_workers();
    row.n_tasks = tasks;
    row.n_playouts = spec.playouts;
    row.board_size = spec.board_size;
    std::vector<double> speedups;
    for (std::size_t g = 0; g < times.size(); ++g) {
      row.kind = RowKind::Game;
      row.game_index = g;
      row.wall_time = times[g];
      row.speedup = baseline / times[g];
      speedups.push_back(row.speedup);
      out.push_back(row);
      if (on_record) on_record(row);
    }
    row.game_index = 0;
    row.kind = RowKind::Mean;
    row.wall_time = sample_mean(times);
    row.speedup = baseline / row.wall_time;
    out.push_back(row);
    if (on_record) on_record(row);
    row.kind = RowKind::Stddev;
    row.wall_time = sample_stddev(times);
    row.speedup = sample_stddev(speedups);
    out.push_back(row);
    if (on_record) on_record(row);
  };

  measure(SchedulerKind::Sequential, 1, 1);
  for (auto kind : spec.schedulers) {
    const bool pooled = kind == SchedulerKind::FifoPool || kind == SchedulerKind::WorkStealing;
    const std::vector<std::size_t> worker_counts = pooled ? spec.workers : std::vector<std::size_t>{1};
    for (auto workers : worker_counts) {
      for (auto tasks : spec.tasks) {
        if (kind == SchedulerKind::Sequential && tasks == 1) continue;  // the baseline
        measure(kind, workers, tasks);
      }
    }
  }
  return out;
}

inline constexpr std::string_view csv_header =
    "scheduler,workers,tasks,playouts,board,game,wall_time_s,speedup";

namespace detail {

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(std::string_view field) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw std::invalid_argument("csv: bad number '" + std::string(field) + "'");
  return value;
}

}  // namespace detail

inline std::string emit_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << csv_header << '\n';
  for (const auto& r : records) {
    out << to_string(r.scheduler) << ',' << r.n_workers << ',' << r.n_tasks << ',' << r.n_playouts
        << ',' << r.board_size << ',';
    switch (r.kind) {
      case RowKind::Game: out << r.game_index; break;
      case RowKind::Mean: out << "mean"; break;
      case RowKind::Stddev: out << "stddev"; break;
    }
    out << ',' << detail::format_double(r.wall_time) << ',' << detail::format_double(r.speedup)
        << '\n';
  }
  return out.str();
}

inline std::vector<BenchRecord> parse_csv(std::string_view text) {
  std::vector<BenchRecord> records;
  bool header = true;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != csv_header) throw std::invalid_argument("csv: unexpected header");
      header = false;
      continue;
    }
    std::vector<std::string_view> f;
    for (std::size_t pos = 0;;) {
      const auto comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 8) throw std::invalid_argument("csv: expected 8 fields");
    BenchRecord r;
    r.scheduler = parse_scheduler_kind(f[0]);
    r.n_workers = detail::parse_number<std::size_t>(f[1]);
    r.n_tasks = detail::parse_number<std::uint64_t>(f[2]);
    r.n_playouts = detail::parse_number<std::uint64_t>(f[3]);
    r.board_size = detail::parse_number<std::size_t>(f[4]);
    if (f[5] == "mean") {
      r.kind = RowKind::Mean;
    } else if (f[5] == "stddev") {
      r.kind = RowKind::Stddev;
    } else {
      r.kind = RowKind::Game;
      r.game_index = detail::parse_number<std::size_t>(f[5]);
    }
    r.wall_time = detail::parse_number<double>(f[6]);
    r.speedup = detail::parse_number<double>(f[7]);
    records.push_back(r);
  }
  return records;
}

}  // namespace gscpm
