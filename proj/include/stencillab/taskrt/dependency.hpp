#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace stencillab::taskrt {

using TaskId = std::uint64_t;
using Location = std::size_t;

inline constexpr TaskId kNoTask = 0;  // real task ids start at 1

struct DependenceEdge {
  TaskId from = kNoTask;
  TaskId to = kNoTask;

  friend auto operator<=>(const DependenceEdge&, const DependenceEdge&) = default;
};

/// Declared accesses of one task, as handed to the tracker.
struct TaskRecord {
  TaskId id = kNoTask;
  std::vector<Location> in;
  std::vector<Location> out;
};

/// Per-location bookkeeping for `in`/`out` dependences.
///
/// A reader orders after the location's last writer. A writer orders after
/// the last writer and after every reader since that write. Locations are
/// dense non-negative integers; storage grows on demand.
///
/// The tracker reports every predecessor the rules name. Whether a reported
/// predecessor has already finished (and so needs no edge) is for the
/// caller to decide.
class DependencyTracker {
 public:
  explicit DependencyTracker(std::size_t location_hint = 0);

  /// Appends the sorted, duplicate-free predecessors of task `id` to
  /// `preds` (after clearing it). Ids must strictly increase across calls
  /// until reset(); violations throw std::invalid_argument.
  void submit(TaskId id, std::span<const Location> in, std::span<const Location> out,
              std::vector<TaskId>& preds);

  std::vector<DependenceEdge> submit(const TaskRecord& task);

  /// Forgets all history, e.g. after every tracked task has completed.
  void reset();

  TaskId last_submitted() const { return last_id_; }

 private:
  struct LocState {
    TaskId last_writer = kNoTask;
    std::vector<TaskId> readers;
  };

  LocState& state(Location loc);

  std::vector<LocState> locs_;
  std::vector<Location> touched_;
  TaskId last_id_ = kNoTask;
};

/// Independent edge oracle: for each ordered pair of tasks decides
/// directly from the access lists whether the rules put an edge between
/// them. Quadratic; meant for small submissions.
std::vector<DependenceEdge> oracle_edges(std::span<const TaskRecord> submission);

/// Runs a whole submission through a fresh tracker and collects the edges,
/// sorted.
std::vector<DependenceEdge> tracker_edges(std::span<const TaskRecord> submission);

}  // namespace stencillab::taskrt
