#pragma once

#include <memory>

#include "gscpm/fifo_pool.hpp"
#include "gscpm/scheduler.hpp"
#include "gscpm/thread_per_task.hpp"
#include "gscpm/work_stealing.hpp"

namespace gscpm {

// n_workers is ignored by the sequential and thread-per-task back-ends.
inline std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind,
                                                 std::size_t n_workers = default_worker_count()) {
  switch (kind) {
    case SchedulerKind::Sequential: return std::make_unique<SequentialScheduler>();
    case SchedulerKind::FifoPool: return std::make_unique<FifoPool>(n_workers);
    case SchedulerKind::WorkStealing: return std::make_unique<WorkStealingPool>(n_workers);
    case SchedulerKind::ThreadPerTask: return std::make_unique<ThreadPerTask>();
  }
  throw std::invalid_argument("make_scheduler: unknown kind");
}

}  // namespace gscpm
