// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spinkac {

enum class Reduction {
  kDeterministic,  // results independent of thread count
  kFast,           // work split follows the thread count
};

// Fixed set of worker threads. run() blocks until every task has finished;
// the calling thread takes part in the work.
class WorkerPool {
 public:
  explicit WorkerPool(int threads);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return static_cast<int>(workers_.size()) + 1; }
  void run(int tasks, const std::function<void(int)>& fn);

 private:
  void worker_loop();
  void drain();

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(int)>* fn_ = nullptr;
  int tasks_ = 0;
  int next_ = 0;
  int finished_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

// Parallelism handed to library routines. A default-constructed value runs
// everything on the calling thread.
struct Execution {
  WorkerPool* pool = nullptr;
  Reduction reduction = Reduction::kDeterministic;

  int threads() const { return pool ? pool->size() : 1; }
};

// Thread count from SPINKAC_THREADS, capped by the hardware.
int default_thread_count();

// Calls fn(i) for every i in [0, count). Each index runs exactly once; the
// order across threads is unspecified, so fn must only write to slot i.
void parallel_for(const Execution& ex, int count,
                  const std::function<void(int)>& fn);

}  // namespace spinkac
