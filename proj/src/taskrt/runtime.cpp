#include "stencillab/taskrt/runtime.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace stencillab::taskrt {

namespace {

struct WorkerTls {
  const TaskRuntime* runtime = nullptr;
  unsigned index = 0;
};

thread_local WorkerTls tls_worker;
thread_local TaskId tls_task = kNoTask;

inline void cpu_relax() {
#if defined(__x86_64__) || defined(__i386__)
  _mm_pause();
#endif
}

inline std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr int kSpinRounds = 64;
constexpr int kYieldRounds = 64;

}  // namespace

TaskRuntime::TaskRuntime(RuntimeOptions options)
    : master_(std::this_thread::get_id()), options_(options), tracker_(options.location_hint) {
  if (options_.workers == 0) throw std::invalid_argument("worker count must be at least 1");
  std::uint64_t seed_base = options_.steal_seed ? *options_.steal_seed : std::random_device{}();
  for (unsigned i = 0; i < options_.workers; ++i) {
    auto w = std::make_unique<Worker>();
    w->rng_state = seed_base + 0x632be59bd9b4e019ULL * (i + 1);
    workers_.push_back(std::move(w));
  }
  threads_.reserve(options_.workers - 1);
  for (unsigned i = 1; i < options_.workers; ++i) {
    threads_.emplace_back([this, i] { worker_loop(i); });
  }
}

TaskRuntime::~TaskRuntime() {
  stop_.store(true, std::memory_order_seq_cst);
  {
    std::lock_guard lk(park_mutex_);
    wake_epoch_.fetch_add(1, std::memory_order_relaxed);
  }
  park_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

unsigned TaskRuntime::worker_index() const {
  if (tls_worker.runtime == this) return tls_worker.index;
  if (std::this_thread::get_id() == master_) return 0;
  throw std::logic_error("calling thread is not a worker of this runtime");
}

TaskId TaskRuntime::current_task() { return tls_task; }

void TaskRuntime::check_master(const char* what) const {
  if (std::this_thread::get_id() != master_) {
    throw std::logic_error(std::string(what) + " may only be called by the master thread");
  }
}

std::vector<WorkerStats> TaskRuntime::stats() const {
  std::vector<WorkerStats> out;
  for (const auto& w : workers_) {
    out.push_back({w->executed.load(std::memory_order_relaxed),
                   w->stolen.load(std::memory_order_relaxed)});
  }
  return out;
}

TaskRuntime::TaskNode* TaskRuntime::allocate(unsigned index) {
  Worker& w = *workers_[index];
  TaskNode* node;
  if (w.pool_used < w.pool.size()) {
    node = &w.pool[w.pool_used];
    node->group = nullptr;
    node->done = false;
    node->successors.clear();
  } else {
    node = &w.pool.emplace_back();
  }
  ++w.pool_used;
  return node;
}

TaskId TaskRuntime::submit(TaskFn fn, std::span<const Location> in,
                           std::span<const Location> out) {
  check_master("submit");
  TaskNode* node = allocate(0);
  node->fn = fn;
  node->tracked = true;
  node->id = next_id_.fetch_add(1, std::memory_order_relaxed);
  node->unmet.store(1, std::memory_order_relaxed);

  tracker_.submit(node->id, in, out, preds_);
  for (TaskId p : preds_) {
    TaskNode* pred = tracked_[p - tracked_base_];
    std::lock_guard lk(pred->lock);
    if (pred->done) continue;
    pred->successors.push_back(node);
    node->unmet.fetch_add(1, std::memory_order_relaxed);
    if (edge_log_) edge_log_->push_back({p, node->id});
  }

  const std::size_t slot = node->id - tracked_base_;
  if (tracked_.size() <= slot) tracked_.resize(slot + 1, nullptr);
  tracked_[slot] = node;

  outstanding_.fetch_add(1, std::memory_order_relaxed);
  if (node->unmet.fetch_sub(1, std::memory_order_acq_rel) == 1) push_ready(node, 0);
  return node->id;
}

TaskId TaskRuntime::spawn(TaskFn fn, TaskGroup* group) {
  const unsigned index = worker_index();
  TaskNode* node = allocate(index);
  node->fn = fn;
  node->tracked = false;
  node->group = group;
  node->id = next_id_.fetch_add(1, std::memory_order_relaxed);
  if (group) group->pending_.fetch_add(1, std::memory_order_relaxed);
  outstanding_.fetch_add(1, std::memory_order_relaxed);
  push_ready(node, index);
  return node->id;
}

void TaskRuntime::push_ready(TaskNode* node, unsigned index) {
  workers_[index]->deque.push(node);
  wake(false);
}

void TaskRuntime::wake(bool all) {
  std::atomic_thread_fence(std::memory_order_seq_cst);
  if (sleepers_.load(std::memory_order_relaxed) == 0) return;
  {
    std::lock_guard lk(park_mutex_);
    wake_epoch_.fetch_add(1, std::memory_order_relaxed);
  }
  if (all) {
    park_cv_.notify_all();
  } else {
    park_cv_.notify_one();
  }
}

bool TaskRuntime::work_visible() const {
  for (const auto& w : workers_)
    if (w->deque.size_hint() > 0) return true;
  return false;
}

void TaskRuntime::park(unsigned index) {
  const std::uint64_t epoch = wake_epoch_.load(std::memory_order_acquire);
  sleepers_.fetch_add(1, std::memory_order_seq_cst);
  if (!work_visible() && !stop_.load(std::memory_order_seq_cst) &&
      region_gen_.load(std::memory_order_seq_cst) == workers_[index]->region_seen) {
    std::unique_lock lk(park_mutex_);
    park_cv_.wait_for(lk, std::chrono::milliseconds(100), [&] {
      return wake_epoch_.load(std::memory_order_relaxed) != epoch ||
             stop_.load(std::memory_order_relaxed);
    });
  }
  sleepers_.fetch_sub(1, std::memory_order_relaxed);
}

TaskRuntime::TaskNode* TaskRuntime::find_task(unsigned index) {
  Worker& self = *workers_[index];
  if (TaskNode* n = self.deque.pop()) return n;
  const auto count = static_cast<unsigned>(workers_.size());
  if (count == 1) return nullptr;
  const auto start = static_cast<unsigned>(splitmix(self.rng_state) % (count - 1));
  for (unsigned k = 0; k < count - 1; ++k) {
    unsigned victim = (start + k) % (count - 1);
    if (victim >= index) ++victim;
    if (TaskNode* n = workers_[victim]->deque.steal()) {
      self.stolen.fetch_add(1, std::memory_order_relaxed);
      return n;
    }
  }
  return nullptr;
}

void TaskRuntime::record_exception(std::exception_ptr e) {
  std::lock_guard lk(error_mutex_);
  if (!error_) error_ = e;
}

void TaskRuntime::execute(TaskNode* node, unsigned index) {
  const TaskId outer = tls_task;
  tls_task = node->id;
  try {
    node->fn();
  } catch (...) {
    record_exception(std::current_exception());
  }
  tls_task = outer;
  workers_[index]->executed.fetch_add(1, std::memory_order_relaxed);
  complete(node, index);
}

void TaskRuntime::complete(TaskNode* node, unsigned index) {
  if (node->tracked) {
    std::vector<TaskNode*> ready;
    {
      std::lock_guard lk(node->lock);
      node->done = true;
      ready.swap(node->successors);
    }
    for (TaskNode* s : ready) {
      if (s->unmet.fetch_sub(1, std::memory_order_acq_rel) == 1) push_ready(s, index);
    }
    // Hand the storage back so the pool keeps its capacity.
    ready.clear();
    std::lock_guard lk(node->lock);
    node->successors.swap(ready);
  }
  if (TaskGroup* g = node->group) g->pending_.fetch_sub(1, std::memory_order_release);
  completed_.fetch_add(1, std::memory_order_relaxed);
  outstanding_.fetch_sub(1, std::memory_order_release);
}

bool TaskRuntime::try_region(unsigned index) {
  Worker& self = *workers_[index];
  const std::uint64_t gen = region_gen_.load(std::memory_order_acquire);
  if (gen == self.region_seen) return false;
  self.region_seen = gen;
  run_region_share(index);
  region_.remaining.fetch_sub(1, std::memory_order_acq_rel);
  return true;
}

void TaskRuntime::run_region_share(unsigned index) {
  const auto& body = *region_.body;
  try {
    if (region_.schedule.kind == Schedule::Kind::Static) {
      const IndexRange part = region_.static_parts[index];
      if (part.size() > 0) body(part.begin, part.end);
    } else {
      const std::size_t chunk = region_.schedule.chunk;
      for (;;) {
        const std::size_t b = region_.next.fetch_add(chunk, std::memory_order_relaxed);
        if (b >= region_.range.end) break;
        body(b, std::min(b + chunk, region_.range.end));
      }
    }
  } catch (...) {
    record_exception(std::current_exception());
  }
}

void TaskRuntime::parallel_for(IndexRange range, Schedule schedule,
                               const std::function<void(std::size_t, std::size_t)>& body) {
  check_master("parallel_for");
  if (range.size() == 0) return;
  if (schedule.kind == Schedule::Kind::Dynamic && schedule.chunk == 0) schedule.chunk = 1;
  region_.body = &body;
  region_.range = range;
  region_.schedule = schedule;
  region_.static_parts = static_chunks(range, workers());
  region_.next.store(range.begin, std::memory_order_relaxed);
  region_.remaining.store(workers(), std::memory_order_relaxed);
  region_gen_.fetch_add(1, std::memory_order_release);
  wake(true);

  try_region(0);
  help_until([this] { return region_.remaining.load(std::memory_order_acquire) == 0; }, 0);

  std::exception_ptr e;
  {
    std::lock_guard lk(error_mutex_);
    e = std::exchange(error_, nullptr);
  }
  if (e) std::rethrow_exception(e);
}

void TaskRuntime::help_until(const std::function<bool()>& done, unsigned index) {
  const bool master = index == 0;
  auto last_progress = std::chrono::steady_clock::now();
  std::uint64_t last_completed = completed_.load(std::memory_order_relaxed);
  int idle = 0;
  while (!done()) {
    if (TaskNode* n = find_task(index)) {
      execute(n, index);
      idle = 0;
      continue;
    }
    if (++idle < kSpinRounds) {
      cpu_relax();
      continue;
    }
    std::this_thread::yield();
    if (!master || (idle & 255) != 0) continue;
    const std::uint64_t c = completed_.load(std::memory_order_relaxed);
    const auto now = std::chrono::steady_clock::now();
    if (c != last_completed) {
      last_completed = c;
      last_progress = now;
    } else if (outstanding_.load(std::memory_order_acquire) > 0 &&
               now - last_progress > options_.stall_timeout) {
      std::ostringstream msg;
      msg << "task runtime stalled: no task completed for "
          << options_.stall_timeout.count() << " ms with "
          << outstanding_.load() << " task(s) outstanding, " << completed_.load()
          << " completed, ready per worker:";
      for (const auto& w : workers_) msg << ' ' << w->deque.size_hint();
      throw StallError(msg.str());
    }
  }
}

void TaskRuntime::wait(TaskGroup& group) {
  help_until([&group] { return group.pending_.load(std::memory_order_acquire) == 0; },
             worker_index());
}

void TaskRuntime::taskwait() {
  check_master("taskwait");
  help_until([this] { return outstanding_.load(std::memory_order_acquire) == 0; }, 0);
  // Everything finished: recycle task storage and forget dependence history.
  for (auto& w : workers_) w->pool_used = 0;
  tracker_.reset();
  tracked_.clear();
  tracked_base_ = next_id_.load(std::memory_order_relaxed);

  std::exception_ptr e;
  {
    std::lock_guard lk(error_mutex_);
    e = std::exchange(error_, nullptr);
  }
  if (e) std::rethrow_exception(e);
}

void TaskRuntime::worker_loop(unsigned index) {
  tls_worker = {this, index};
  Worker& self = *workers_[index];
  int idle = 0;
  while (!stop_.load(std::memory_order_acquire)) {
    if (try_region(index)) {
      idle = 0;
      continue;
    }
    if (TaskNode* n = find_task(index)) {
      execute(n, index);
      idle = 0;
      continue;
    }
    ++idle;
    if (idle < kSpinRounds) {
      cpu_relax();
    } else if (idle < kSpinRounds + kYieldRounds) {
      std::this_thread::yield();
    } else {
      park(index);
      idle = 0;
    }
  }
  (void)self;
}

}  // namespace stencillab::taskrt
