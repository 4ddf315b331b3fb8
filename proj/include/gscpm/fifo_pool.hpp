#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include "gscpm/scheduler.hpp"

namespace gscpm {

/// Work-sharing thread pool: one shared FIFO queue, idle workers sleep on a
/// condition variable and take tasks from the head. submit() returns
/// immediately.
class FifoPool final : public Scheduler {
public:
  explicit FifoPool(std::size_t n_workers = default_worker_count()) {
    if (n_workers == 0) throw std::invalid_argument("FifoPool: n_workers must be >= 1");
    workers_.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) workers_.emplace_back([this] { worker_loop(); });
  }

  ~FifoPool() override {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    work_available_.notify_all();
    for (auto& t : workers_) t.join();
  }

  FifoPool(const FifoPool&) = delete;
  FifoPool& operator=(const FifoPool&) = delete;

  SchedulerKind kind() const noexcept override { return SchedulerKind::FifoPool; }
  std::size_t n_workers() const noexcept override { return workers_.size(); }

  void wait() override {
    {
      std::unique_lock lock(mutex_);
      waiting_ = true;
      batch_done_.wait(lock, [this] { return pending_ == 0; });
      waiting_ = false;
    }
    rethrow_captured();
  }

  std::size_t queue_length() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
  }

  std::size_t parked_workers() const {
    std::lock_guard lock(mutex_);
    return parked_;
  }

  // Both values from one critical section.
  std::pair<std::size_t, std::size_t> parked_and_queued() const {
    std::lock_guard lock(mutex_);
    return {parked_, queue_.size()};
  }

protected:
  void do_submit(Task task) override {
    {
      std::lock_guard lock(mutex_);
      if (waiting_ && current_pool() != this)
        throw std::logic_error("FifoPool: submit during wait() from outside the pool");
      queue_.push_back(std::move(task));
      ++pending_;
    }
    work_available_.notify_one();
  }

private:
  static const FifoPool*& current_pool() noexcept {
    thread_local const FifoPool* pool = nullptr;
    return pool;
  }

  void worker_loop() {
    current_pool() = this;
    std::unique_lock lock(mutex_);
    for (;;) {
      ++parked_;
      work_available_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      --parked_;
      if (queue_.empty()) return;  // stopping
      Task task = std::move(queue_.front());
      queue_.pop_front();
      lock.unlock();
      run_captured(task);
      task = nullptr;
      lock.lock();
      if (--pending_ == 0) batch_done_.notify_all();
    }
  }

  mutable std::mutex mutex_;
  std::condition_variable work_available_;
  std::condition_variable batch_done_;
  std::deque<Task> queue_;
  std::size_t pending_ = 0;
  std::size_t parked_ = 0;
  bool waiting_ = false;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace gscpm
