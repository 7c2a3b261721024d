#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "stencillab/taskrt/dependency.hpp"
#include "stencillab/taskrt/schedule.hpp"
#include "stencillab/taskrt/task_fn.hpp"
#include "stencillab/taskrt/ws_deque.hpp"

namespace stencillab::taskrt {

struct RuntimeOptions {
  unsigned workers = 1;
  /// Seeds victim selection so steal attempts replay identically.
  std::optional<std::uint64_t> steal_seed;
  /// No completion for this long while tasks are pending aborts the wait.
  std::chrono::milliseconds stall_timeout{10'000};
  /// Size hint for the dependency tracker's dense location table.
  std::size_t location_hint = 0;
};

class StallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Completion counter for a set of spawned tasks (scoped wait).
class TaskGroup {
 public:
  TaskGroup() = default;
  TaskGroup(const TaskGroup&) = delete;
  TaskGroup& operator=(const TaskGroup&) = delete;

  std::int64_t pending() const { return pending_.load(std::memory_order_acquire); }

 private:
  friend class TaskRuntime;
  std::atomic<std::int64_t> pending_{0};
};

struct WorkerStats {
  std::uint64_t executed = 0;
  std::uint64_t stolen = 0;
};

/// Work-stealing task runtime with OpenMP-style `in`/`out` dependences.
///
/// The constructing thread acts as worker 0 ("master"): it submits tracked
/// tasks, launches parallel_for regions and calls taskwait, executing tasks
/// while it waits. Workers 1..T-1 are pool threads created here and parked
/// when idle. Any worker may spawn dependency-free tasks and wait on groups.
class TaskRuntime {
 public:
  explicit TaskRuntime(RuntimeOptions options);
  explicit TaskRuntime(unsigned workers) : TaskRuntime(make_options(workers)) {}
  ~TaskRuntime();

  TaskRuntime(const TaskRuntime&) = delete;
  TaskRuntime& operator=(const TaskRuntime&) = delete;

  unsigned workers() const { return static_cast<unsigned>(workers_.size()); }

  /// Master only. Orders the task after earlier unfinished tasks per the
  /// dependence rules; it may start before this call returns.
  TaskId submit(TaskFn fn, std::span<const Location> in, std::span<const Location> out);

  /// Any worker. No dependences; `group` (optional) counts its completion.
  TaskId spawn(TaskFn fn, TaskGroup* group = nullptr);

  /// Any worker. Executes tasks until the group has drained.
  void wait(TaskGroup& group);

  /// Master only. Returns once every task created so far has finished;
  /// rethrows the first exception a task raised.
  void taskwait();

  /// Master only. Runs body(chunk_begin, chunk_end) over the range. Static:
  /// chunk i of static_chunks(range, T) on worker i. Dynamic: chunks
  /// claimed in order by whichever worker is free. Ends with a barrier.
  void parallel_for(IndexRange range, Schedule schedule,
                    const std::function<void(std::size_t, std::size_t)>& body);

  /// Index of the calling worker; throws if the caller is not one.
  unsigned worker_index() const;

  /// Id of the task the calling thread is executing, or kNoTask.
  static TaskId current_task();

  /// Edges actually added by later submits are appended here (master only).
  void set_edge_log(std::vector<DependenceEdge>* log) { edge_log_ = log; }

  std::vector<WorkerStats> stats() const;

 private:
  static RuntimeOptions make_options(unsigned workers) {
    RuntimeOptions o;
    o.workers = workers;
    return o;
  }

  struct TaskNode {
    TaskFn fn;
    TaskId id = kNoTask;
    TaskGroup* group = nullptr;
    bool tracked = false;
    std::atomic<std::int32_t> unmet{0};
    std::mutex lock;
    bool done = false;
    std::vector<TaskNode*> successors;
  };

  struct alignas(64) Worker {
    WorkStealingDeque<TaskNode*> deque;
    std::deque<TaskNode> pool;
    std::size_t pool_used = 0;
    std::uint64_t rng_state = 0;
    std::uint64_t region_seen = 0;
    std::atomic<std::uint64_t> executed{0};
    std::atomic<std::uint64_t> stolen{0};
  };

  struct Region {
    const std::function<void(std::size_t, std::size_t)>* body = nullptr;
    IndexRange range;
    Schedule schedule;
    std::vector<IndexRange> static_parts;
    std::atomic<std::size_t> next{0};
    std::atomic<unsigned> remaining{0};
  };

  void worker_loop(unsigned index);
  TaskNode* allocate(unsigned index);
  TaskNode* find_task(unsigned index);
  void execute(TaskNode* node, unsigned index);
  void complete(TaskNode* node, unsigned index);
  void push_ready(TaskNode* node, unsigned index);
  bool try_region(unsigned index);
  void run_region_share(unsigned index);
  void help_until(const std::function<bool()>& done, unsigned index);
  void check_master(const char* what) const;
  void wake(bool all);
  void park(unsigned index);
  bool work_visible() const;
  void record_exception(std::exception_ptr e);

  std::vector<std::unique_ptr<Worker>> workers_;
  std::vector<std::thread> threads_;
  std::thread::id master_;
  RuntimeOptions options_;

  std::atomic<TaskId> next_id_{1};
  std::atomic<std::int64_t> outstanding_{0};
  std::atomic<std::uint64_t> completed_{0};
  std::atomic<bool> stop_{false};

  DependencyTracker tracker_;
  std::vector<TaskNode*> tracked_;
  TaskId tracked_base_ = 1;
  std::vector<TaskId> preds_;
  std::vector<DependenceEdge>* edge_log_ = nullptr;

  Region region_;
  std::atomic<std::uint64_t> region_gen_{0};

  std::mutex park_mutex_;
  std::condition_variable park_cv_;
  std::atomic<int> sleepers_{0};
  std::atomic<std::uint64_t> wake_epoch_{0};

  std::mutex error_mutex_;
  std::exception_ptr error_;
};

}  // namespace stencillab::taskrt
