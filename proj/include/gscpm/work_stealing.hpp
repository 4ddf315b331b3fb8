#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "gscpm/scheduler.hpp"

namespace gscpm {

// Double-ended task queue. The owner works at the bottom (newest end),
// thieves take from the top (oldest end). Every operation is linearizable
// under the internal lock, so each element is taken exactly once.
template <class T>
class WorkStealingDeque {
public:
  void push_bottom(T value) {
    std::lock_guard lock(mutex_);
    items_.push_back(std::move(value));
  }

  std::optional<T> pop_bottom() {
    std::lock_guard lock(mutex_);
    if (items_.empty()) return std::nullopt;
    T value = std::move(items_.back());
    items_.pop_back();
    return value;
  }

  std::optional<T> steal_top() {
    std::lock_guard lock(mutex_);
    if (items_.empty()) return std::nullopt;
    T value = std::move(items_.front());
    items_.pop_front();
    return value;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }

private:
  mutable std::mutex mutex_;
  std::deque<T> items_;
};

/// Child-stealing pool. Each worker owns a deque; tasks submitted by a worker
/// go to the bottom of its own deque, tasks from outside are dealt round-robin.
/// An idle worker pops its own bottom, then tries to steal the oldest task of
/// randomly chosen victims for a bounded number of rounds before parking.
class WorkStealingPool final : public Scheduler {
public:
  static constexpr int steal_rounds = 64;

  explicit WorkStealingPool(std::size_t n_workers = default_worker_count()) : deques_(n_workers) {
    if (n_workers == 0) throw std::invalid_argument("WorkStealingPool: n_workers must be >= 1");
    threads_.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) threads_.emplace_back([this, i] { worker_loop(i); });
  }

  ~WorkStealingPool() override {
    {
      std::lock_guard lock(park_mutex_);
      stopping_ = true;
    }
    work_available_.notify_all();
    for (auto& t : threads_) t.join();
  }

  WorkStealingPool(const WorkStealingPool&) = delete;
  WorkStealingPool& operator=(const WorkStealingPool&) = delete;

  SchedulerKind kind() const noexcept override { return SchedulerKind::WorkStealing; }
  std::size_t n_workers() const noexcept override { return deques_.size(); }

  void wait() override {
    {
      std::unique_lock lock(done_mutex_);
      waiting_ = true;
      batch_done_.wait(lock, [this] { return pending_.load(std::memory_order_acquire) == 0; });
      waiting_ = false;
    }
    rethrow_captured();
  }

  // Takes the oldest task of `victim`, if any.
  std::optional<Task> steal(std::size_t victim) {
    auto task = deques_.at(victim).steal_top();
    if (task) queued_.fetch_sub(1, std::memory_order_acq_rel);
    return task;
  }

  std::size_t queued() const noexcept {
    return static_cast<std::size_t>(queued_.load(std::memory_order_acquire));
  }

protected:
  void do_submit(Task task) override {
    const auto self = current_worker();
    if (self.pool != this) {
      std::lock_guard lock(done_mutex_);
      if (waiting_) throw std::logic_error("WorkStealingPool: submit during wait() from outside the pool");
    }
    pending_.fetch_add(1, std::memory_order_acq_rel);
    const std::size_t target =
        self.pool == this ? self.index : next_.fetch_add(1, std::memory_order_relaxed) % deques_.size();
    {
      std::lock_guard lock(park_mutex_);
      queued_.fetch_add(1, std::memory_order_acq_rel);
    }
    deques_[target].push_bottom(std::move(task));
    work_available_.notify_one();
  }

private:
  struct WorkerId {
    const WorkStealingPool* pool = nullptr;
    std::size_t index = 0;
  };

  static WorkerId& current_worker() noexcept {
    thread_local WorkerId id;
    return id;
  }

  std::optional<Task> find_task(std::size_t self, std::minstd_rand& rng) {
    if (auto task = deques_[self].pop_bottom()) {
      queued_.fetch_sub(1, std::memory_order_acq_rel);
      return task;
    }
    const std::size_t n = deques_.size();
    if (n == 1) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, n - 2);
    for (int round = 0; round < steal_rounds; ++round) {
      if (queued_.load(std::memory_order_acquire) <= 0) return std::nullopt;
      std::size_t victim = pick(rng);
      if (victim >= self) ++victim;
      if (auto task = steal(victim)) return task;
      if (round % 8 == 7) std::this_thread::yield();
    }
    return std::nullopt;
  }

  void worker_loop(std::size_t self) {
    current_worker() = {this, self};
    std::minstd_rand rng(static_cast<std::uint32_t>(self + 1));
    for (;;) {
      if (auto task = find_task(self, rng)) {
        run_captured(*task);
        *task = nullptr;
        if (pending_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
          std::lock_guard lock(done_mutex_);
          batch_done_.notify_all();
        }
        continue;
      }
      std::unique_lock lock(park_mutex_);
      // queued_ is raised before the push, so a positive value may briefly
      // precede the task's arrival; the worker then just retries.
      work_available_.wait(lock, [this] {
        return stopping_ || queued_.load(std::memory_order_acquire) > 0;
      });
      if (stopping_ && queued_.load(std::memory_order_acquire) <= 0) return;
    }
  }

  std::vector<WorkStealingDeque<Task>> deques_;
  std::atomic<std::int64_t> queued_{0};
  std::atomic<std::int64_t> pending_{0};
  std::atomic<std::size_t> next_{0};

  std::mutex park_mutex_;
  std::condition_variable work_available_;
  bool stopping_ = false;

  std::mutex done_mutex_;
  std::condition_variable batch_done_;
  bool waiting_ = false;

  std::vector<std::thread> threads_;
};

}  // namespace gscpm
