// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinkac/execution.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace spinkac {

WorkerPool::WorkerPool(int threads) {
  for (int i = 1; i < std::max(threads, 1); ++i) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : workers_) t.join();
}

void WorkerPool::drain() {
  for (;;) {
    int task;
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (next_ >= tasks_) return;
      task = next_++;
    }
    (*fn_)(task);
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (++finished_ == tasks_) done_.notify_all();
    }
  }
}

void WorkerPool::worker_loop() {
  std::uint64_t seen = 0;
  for (;;) {
    {
      std::unique_lock<std::mutex> lock(mu_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    drain();
  }
}

void WorkerPool::run(int tasks, const std::function<void(int)>& fn) {
  if (tasks <= 0) return;
  if (workers_.empty() || tasks == 1) {
    for (int i = 0; i < tasks; ++i) fn(i);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    fn_ = &fn;
    tasks_ = tasks;
    next_ = 0;
    finished_ = 0;
    ++generation_;
  }
  wake_.notify_all();
  drain();
  std::unique_lock<std::mutex> lock(mu_);
  done_.wait(lock, [&] { return finished_ == tasks_; });
  fn_ = nullptr;
}

int default_thread_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("SPINKAC_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1) return std::min(cap, hw);
    } catch (const std::exception&) {
    }
  }
  return hw;
}

void parallel_for(const Execution& ex, int count,
                  const std::function<void(int)>& fn) {
  if (ex.pool == nullptr) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  ex.pool->run(count, fn);
}

}  // namespace spinkac
