#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gscpm/schedulers.hpp"

namespace {

using namespace gscpm;
using namespace std::chrono_literals;

const std::vector<SchedulerKind> all_kinds{SchedulerKind::Sequential, SchedulerKind::FifoPool,
                                           SchedulerKind::WorkStealing,
                                           SchedulerKind::ThreadPerTask};

void busy_spin(std::chrono::microseconds d) {
  const auto until = std::chrono::steady_clock::now() + d;
  while (std::chrono::steady_clock::now() < until) {
  }
}

TEST(SchedulerKind, NamesRoundTrip) {
  for (auto kind : all_kinds) EXPECT_EQ(parse_scheduler_kind(to_string(kind)), kind);
  EXPECT_THROW(parse_scheduler_kind("cilk"), std::invalid_argument);
}

TEST(Sequential, RunsInline) {
  SequentialScheduler s;
  bool ran = false;
  s.submit([&] { ran = true; });
  EXPECT_TRUE(ran);
  s.wait();
}

TEST(Schedulers, WaitWithNothingSubmitted) {
  for (auto kind : all_kinds) {
    auto s = make_scheduler(kind, 3);
    s->wait();
    s->wait();
  }
}

TEST(Schedulers, NoOpTasksAllFinish) {
  for (auto kind : all_kinds) {
    auto s = make_scheduler(kind, 4);
    TaskProbe probe;
    s->set_probe(&probe);
    for (int i = 0; i < 100; ++i) s->submit([] {});
    s->wait();
    EXPECT_EQ(probe.submitted.load(), 100u) << to_string(kind);
    EXPECT_EQ(probe.started.load(), 100u) << to_string(kind);
    EXPECT_EQ(probe.finished.load(), 100u) << to_string(kind);
  }
}

TEST(Schedulers, RandomBusySpinsComplete) {
  std::mt19937 gen(5);
  for (auto kind : all_kinds) {
    auto s = make_scheduler(kind, 3);
    TaskProbe probe;
    s->set_probe(&probe);
    for (int batch = 0; batch < 2; ++batch) {
      for (int i = 0; i < 30; ++i) {
        const auto us = std::chrono::microseconds(gen() % 5001);
        s->submit([us] { busy_spin(us); });
      }
      s->wait();
      EXPECT_EQ(probe.finished.load(), probe.submitted.load()) << to_string(kind);
    }
  }
}

TEST(Schedulers, ExactlyOnce) {
  constexpr int n_tasks = 10'000;
  for (auto kind : all_kinds) {
    const int reps = kind == SchedulerKind::ThreadPerTask ? 1 : 5;
    auto s = make_scheduler(kind, 4);
    for (int rep = 0; rep < reps; ++rep) {
      std::vector<std::atomic<int>> counts(n_tasks);
      for (int i = 0; i < n_tasks; ++i)
        s->submit([&counts, i] { counts[i].fetch_add(1, std::memory_order_relaxed); });
      s->wait();
      for (int i = 0; i < n_tasks; ++i) ASSERT_EQ(counts[i].load(), 1) << to_string(kind) << " " << i;
    }
  }
}

TEST(Schedulers, HighWaterBoundedByWorkers) {
  for (auto kind : {SchedulerKind::FifoPool, SchedulerKind::WorkStealing}) {
    for (std::size_t workers : {1u, 2u, 3u}) {
      auto s = make_scheduler(kind, workers);
      TaskProbe probe;
      s->set_probe(&probe);
      for (int i = 0; i < 50; ++i) s->submit([] { busy_spin(200us); });
      s->wait();
      EXPECT_LE(probe.concurrent_high_water.load(), workers);
      EXPECT_GE(probe.concurrent_high_water.load(), 1u);
    }
    // Fewer tasks than workers.
    auto s = make_scheduler(kind, 8);
    TaskProbe probe;
    s->set_probe(&probe);
    for (int i = 0; i < 2; ++i) s->submit([] { busy_spin(2ms); });
    s->wait();
    EXPECT_LE(probe.concurrent_high_water.load(), 2u);
  }
}

TEST(Schedulers, TaskExceptionSurfacesInWait) {
  for (auto kind : all_kinds) {
    auto s = make_scheduler(kind, 2);
    if (kind == SchedulerKind::Sequential) {
      EXPECT_THROW(s->submit([] { throw std::runtime_error("boom"); }), std::runtime_error);
      continue;
    }
    std::atomic<int> ran{0};
    s->submit([] { throw std::runtime_error("boom"); });
    for (int i = 0; i < 10; ++i) s->submit([&] { ++ran; });
    EXPECT_THROW(s->wait(), std::runtime_error) << to_string(kind);
    EXPECT_EQ(ran.load(), 10);
    s->submit([&] { ++ran; });
    EXPECT_NO_THROW(s->wait());
    EXPECT_EQ(ran.load(), 11);
  }
}

TEST(Schedulers, SubmitDuringWaitIsRejected) {
  for (auto kind : {SchedulerKind::FifoPool, SchedulerKind::WorkStealing,
                    SchedulerKind::ThreadPerTask}) {
    auto s = make_scheduler(kind, 1);
    std::atomic<bool> release{false};
    s->submit([&] {
      while (!release.load()) std::this_thread::sleep_for(1ms);
    });
    std::thread waiter([&] { s->wait(); });
    std::this_thread::sleep_for(100ms);
    EXPECT_THROW(s->submit([] {}), std::logic_error) << to_string(kind);
    release = true;
    waiter.join();
    s->submit([] {});  // a new batch is fine
    s->wait();
  }
}

TEST(FifoPool, SingleWorkerStartsInSubmissionOrder) {
  FifoPool pool(1);
  std::mutex m;
  std::vector<int> order;
  std::vector<std::chrono::steady_clock::time_point> starts(200);
  for (int i = 0; i < 200; ++i) {
    pool.submit([&, i] {
      starts[i] = std::chrono::steady_clock::now();
      std::lock_guard lock(m);
      order.push_back(i);
    });
  }
  pool.wait();
  ASSERT_EQ(order.size(), 200u);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(order[i], i);
  for (int i = 1; i < 200; ++i) EXPECT_LE(starts[i - 1], starts[i]);
}

TEST(FifoPool, BoundedReordering) {
  constexpr std::size_t workers = 4;
  FifoPool pool(workers);
  constexpr int n = 2000;
  std::atomic<int> ticket{0};
  std::vector<int> start_rank(n);
  for (int i = 0; i < n; ++i) {
    pool.submit([&, i] {
      start_rank[i] = ticket.fetch_add(1);
      busy_spin(std::chrono::microseconds(i % 7 * 10));
    });
  }
  pool.wait();
  // The task taking start position k was among the first k + workers submitted.
  std::vector<int> by_rank(n);
  for (int i = 0; i < n; ++i) by_rank[start_rank[i]] = i;
  for (int k = 0; k < n; ++k) EXPECT_LT(by_rank[k], k + static_cast<int>(workers));
}

TEST(FifoPool, NoParkingWhileWorkIsQueued) {
  FifoPool pool(2);
  std::atomic<bool> done{false};
  auto longest = std::chrono::steady_clock::duration::zero();
  std::thread sampler([&] {
    std::optional<std::chrono::steady_clock::time_point> since;
    while (!done.load()) {
      const auto [parked, queued] = pool.parked_and_queued();
      const auto now = std::chrono::steady_clock::now();
      if (parked > 0 && queued > 0) {
        if (!since) since = now;
        longest = std::max(longest, now - *since);
      } else {
        since.reset();
      }
      std::this_thread::sleep_for(50us);
    }
  });
  for (int round = 0; round < 20; ++round) {
    for (int i = 0; i < 50; ++i) pool.submit([] { busy_spin(100us); });
    pool.wait();
    std::this_thread::sleep_for(2ms);
  }
  done = true;
  sampler.join();
  EXPECT_LT(longest, std::chrono::milliseconds(100));
}

TEST(WorkStealingDeque, ThiefTakesOldest) {
  WorkStealingDeque<int> dq;
  dq.push_bottom(1);
  dq.push_bottom(2);
  EXPECT_EQ(dq.steal_top(), 1);
  EXPECT_EQ(dq.size(), 1u);
  dq.push_bottom(3);
  EXPECT_EQ(dq.pop_bottom(), 3);
  EXPECT_EQ(dq.pop_bottom(), 2);
  EXPECT_EQ(dq.steal_top(), std::nullopt);
  EXPECT_EQ(dq.pop_bottom(), std::nullopt);
}

TEST(WorkStealingDeque, ConcurrentTakesAreExactlyOnce) {
  WorkStealingDeque<int> dq;
  constexpr int n = 20000;
  for (int i = 0; i < n; ++i) dq.push_bottom(i);
  std::vector<std::atomic<int>> taken(n);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (;;) {
        auto v = t == 0 ? dq.pop_bottom() : dq.steal_top();
        if (!v) return;
        taken[*v].fetch_add(1);
      }
    });
  }
  for (auto& th : threads) th.join();
  for (int i = 0; i < n; ++i) ASSERT_EQ(taken[i].load(), 1);
}

TEST(WorkStealingPool, StealFromIdlePoolIsEmpty) {
  WorkStealingPool pool(3);
  EXPECT_FALSE(pool.steal(1).has_value());
  EXPECT_EQ(pool.queued(), 0u);
}

TEST(WorkStealingPool, NestedSubmissionsAreWaitedFor) {
  WorkStealingPool pool(3);
  std::atomic<int> leaves{0};
  for (int i = 0; i < 20; ++i) {
    pool.submit([&] {
      for (int j = 0; j < 20; ++j) pool.submit([&] { leaves.fetch_add(1); });
    });
  }
  pool.wait();
  EXPECT_EQ(leaves.load(), 400);
}

TEST(ThreadPerTask, OneThreadPerTask) {
  ThreadPerTask s;
  std::mutex m;
  std::set<std::thread::id> ids;
  for (int i = 0; i < 256; ++i) {
    s.submit([&] {
      std::lock_guard lock(m);
      ids.insert(std::this_thread::get_id());
    });
  }
  s.wait();
  EXPECT_EQ(ids.size(), 256u);
  EXPECT_EQ(ids.count(std::this_thread::get_id()), 0u);
}

}  // namespace
