#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

namespace gscpm {

enum class SchedulerKind { Sequential, FifoPool, WorkStealing, ThreadPerTask };

inline std::string_view to_string(SchedulerKind kind) noexcept {
  switch (kind) {
    case SchedulerKind::Sequential: return "sequential";
    case SchedulerKind::FifoPool: return "fifo";
    case SchedulerKind::WorkStealing: return "steal";
    case SchedulerKind::ThreadPerTask: return "thread-per-task";
  }
  return "unknown";
}

inline SchedulerKind parse_scheduler_kind(std::string_view name) {
  if (name == "sequential") return SchedulerKind::Sequential;
  if (name == "fifo") return SchedulerKind::FifoPool;
  if (name == "steal") return SchedulerKind::WorkStealing;
  if (name == "thread-per-task") return SchedulerKind::ThreadPerTask;
  throw std::invalid_argument("unknown scheduler '" + std::string(name) + "'");
}

inline std::size_t default_worker_count() noexcept {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Test instrumentation; attach with Scheduler::set_probe.
struct TaskProbe {
  std::atomic<std::uint64_t> submitted{0};
  std::atomic<std::uint64_t> started{0};
  std::atomic<std::uint64_t> finished{0};
  std::atomic<std::uint64_t> in_flight{0};
  std::atomic<std::uint64_t> concurrent_high_water{0};

  void on_start() noexcept {
    started.fetch_add(1, std::memory_order_relaxed);
    const auto now = in_flight.fetch_add(1, std::memory_order_acq_rel) + 1;
    auto seen = concurrent_high_water.load(std::memory_order_relaxed);
    while (now > seen && !concurrent_high_water.compare_exchange_weak(seen, now)) {
    }
  }

  void on_finish() noexcept {
    in_flight.fetch_sub(1, std::memory_order_acq_rel);
    finished.fetch_add(1, std::memory_order_release);
  }
};

/// Uniform submit/wait contract over the execution back-ends.
///
/// Tasks submitted between two wait() calls form a batch; wait() returns once
/// every task of the batch has finished, and rethrows the first exception any
/// of them raised. Submitting from outside the pool while another thread is
/// inside wait() is a contract violation and throws std::logic_error.
class Scheduler {
public:
  using Task = std::function<void()>;

  virtual ~Scheduler() = default;

  virtual SchedulerKind kind() const noexcept = 0;
  virtual std::size_t n_workers() const noexcept = 0;
  virtual void wait() = 0;

  void submit(Task task) {
    if (!task) throw std::invalid_argument("submit: empty task");
    if (probe_ != nullptr) {
      probe_->submitted.fetch_add(1, std::memory_order_relaxed);
      task = [probe = probe_, inner = std::move(task)] {
        probe->on_start();
        try {
          inner();
        } catch (...) {
          probe->on_finish();
          throw;
        }
        probe->on_finish();
      };
    }
    do_submit(std::move(task));
  }

  void set_probe(TaskProbe* probe) noexcept { probe_ = probe; }

protected:
  virtual void do_submit(Task task) = 0;

  // Records the first failure of a batch; rethrown by wait().
  void capture_exception(std::exception_ptr e) {
    std::lock_guard lock(error_mutex_);
    if (!error_) error_ = std::move(e);
  }

  void rethrow_captured() {
    std::exception_ptr e;
    {
      std::lock_guard lock(error_mutex_);
      e = std::exchange(error_, nullptr);
    }
    if (e) std::rethrow_exception(e);
  }

  void run_captured(Task& task) noexcept {
    try {
      task();
    } catch (...) {
      capture_exception(std::current_exception());
    }
  }

private:
  TaskProbe* probe_ = nullptr;
  std::mutex error_mutex_;
  std::exception_ptr error_;
};

// Runs each task inline inside submit().
class SequentialScheduler final : public Scheduler {
public:
  SchedulerKind kind() const noexcept override { return SchedulerKind::Sequential; }
  std::size_t n_workers() const noexcept override { return 1; }
  void wait() override {}

protected:
  void do_submit(Task task) override { task(); }
};

}  // namespace gscpm
