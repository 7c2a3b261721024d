#include "stencillab/taskrt/dependency.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace stencillab::taskrt {

DependencyTracker::DependencyTracker(std::size_t location_hint) { locs_.resize(location_hint); }

DependencyTracker::LocState& DependencyTracker::state(Location loc) {
  if (loc >= locs_.size()) locs_.resize(std::max(loc + 1, locs_.size() * 2));
  return locs_[loc];
}

void DependencyTracker::submit(TaskId id, std::span<const Location> in,
                               std::span<const Location> out, std::vector<TaskId>& preds) {
  if (id == kNoTask || id <= last_id_) {
    throw std::invalid_argument("task id " + std::to_string(id) +
                                " does not follow last submitted id " + std::to_string(last_id_));
  }
  last_id_ = id;
  preds.clear();

  for (Location loc : in) {
    const LocState& s = state(loc);
    if (s.last_writer != kNoTask) preds.push_back(s.last_writer);
  }
  for (Location loc : out) {
    const LocState& s = state(loc);
    if (s.last_writer != kNoTask) preds.push_back(s.last_writer);
    preds.insert(preds.end(), s.readers.begin(), s.readers.end());
  }

  for (Location loc : out) {
    LocState& s = state(loc);
    if (s.last_writer == kNoTask && s.readers.empty()) touched_.push_back(loc);
    s.last_writer = id;
    s.readers.clear();
  }
  for (Location loc : in) {
    LocState& s = state(loc);
    if (s.last_writer == kNoTask && s.readers.empty()) touched_.push_back(loc);
    if (s.readers.empty() || s.readers.back() != id) s.readers.push_back(id);
  }

  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  // A location listed as both in and out makes the task its own reader.
  std::erase(preds, id);
}

std::vector<DependenceEdge> DependencyTracker::submit(const TaskRecord& task) {
  std::vector<TaskId> preds;
  submit(task.id, task.in, task.out, preds);
  std::vector<DependenceEdge> edges;
  edges.reserve(preds.size());
  for (TaskId p : preds) edges.push_back({p, task.id});
  return edges;
}

void DependencyTracker::reset() {
  for (Location loc : touched_) {
    locs_[loc].last_writer = kNoTask;
    locs_[loc].readers.clear();
  }
  touched_.clear();
  last_id_ = kNoTask;
}

std::vector<DependenceEdge> tracker_edges(std::span<const TaskRecord> submission) {
  DependencyTracker tracker;
  std::vector<DependenceEdge> all;
  for (const TaskRecord& t : submission) {
    auto e = tracker.submit(t);
    all.insert(all.end(), e.begin(), e.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

namespace {

bool contains(const std::vector<Location>& v, Location loc) {
  return std::find(v.begin(), v.end(), loc) != v.end();
}

}  // namespace

std::vector<DependenceEdge> oracle_edges(std::span<const TaskRecord> submission) {
  std::vector<DependenceEdge> edges;
  const std::size_t count = submission.size();
  for (std::size_t j = 0; j < count; ++j) {
    const TaskRecord& later = submission[j];
    for (std::size_t i = 0; i < j; ++i) {
      const TaskRecord& earlier = submission[i];
      bool edge = false;
      // Location L links i -> j when no task strictly between them writes L
      // and either i writes L (j touches it at all) or i reads L and j
      // writes it.
      auto unshadowed = [&](Location loc) {
        for (std::size_t m = i + 1; m < j; ++m)
          if (contains(submission[m].out, loc)) return false;
        return true;
      };
      for (Location loc : earlier.out) {
        if ((contains(later.in, loc) || contains(later.out, loc)) && unshadowed(loc)) {
          edge = true;
          break;
        }
      }
      if (!edge) {
        for (Location loc : earlier.in) {
          if (contains(later.out, loc) && unshadowed(loc)) {
            edge = true;
            break;
          }
        }
      }
      if (edge) edges.push_back({earlier.id, later.id});
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace stencillab::taskrt
