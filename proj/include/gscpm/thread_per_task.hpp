#pragma once

#include <mutex>
#include <thread>
#include <vector>

#include "gscpm/scheduler.hpp"

namespace gscpm {

// Spawns one std::thread per submitted task; wait() joins them all.
class ThreadPerTask final : public Scheduler {
public:
  ThreadPerTask() = default;
  ~ThreadPerTask() override {
    for (auto& t : threads_)
      if (t.joinable()) t.join();
  }

  ThreadPerTask(const ThreadPerTask&) = delete;
  ThreadPerTask& operator=(const ThreadPerTask&) = delete;

  SchedulerKind kind() const noexcept override { return SchedulerKind::ThreadPerTask; }
  std::size_t n_workers() const noexcept override { return 0; }

  void wait() override {
    std::vector<std::thread> batch;
    {
      std::lock_guard lock(mutex_);
      waiting_ = true;
      batch.swap(threads_);
    }
    for (auto& t : batch) t.join();
    {
      std::lock_guard lock(mutex_);
      waiting_ = false;
    }
    rethrow_captured();
  }

protected:
  void do_submit(Task task) override {
    std::lock_guard lock(mutex_);
    if (waiting_) throw std::logic_error("ThreadPerTask: submit during wait()");
    threads_.emplace_back([this, task = std::move(task)]() mutable { run_captured(task); });
  }

private:
  std::mutex mutex_;
  std::vector<std::thread> threads_;
  bool waiting_ = false;
};

}  // namespace gscpm
