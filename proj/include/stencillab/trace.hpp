#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stencillab/kernels.hpp"
#include "stencillab/mesh.hpp"
#include "stencillab/taskrt/dependency.hpp"

namespace stencillab {

/// One cell update: which task ran it, on which worker, over which
/// monotonic-clock interval [start, end).
struct TraceRecord {
  taskrt::TaskId task = taskrt::kNoTask;
  unsigned worker = 0;
  std::size_t cell = 0;
  std::int64_t start = 0;
  std::int64_t end = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Per-worker, preallocated, append-only logs of cell updates.
class ExecutionTrace {
 public:
  ExecutionTrace(unsigned workers, std::size_t capacity_per_worker);

  static std::int64_t now_ns();

  /// Called by `worker` only. Records past capacity are dropped and flag
  /// overflow().
  void record(const TraceRecord& r) noexcept {
    Log& log = logs_[r.worker];
    if (log.size < log.records.size()) {
      log.records[log.size++] = r;
    } else {
      log.overflow = true;
    }
  }

  bool overflow() const;
  std::size_t size() const;
  unsigned workers() const { return static_cast<unsigned>(logs_.size()); }
  void clear();

  /// All records sorted by (start, worker). Throws on overflow.
  std::vector<TraceRecord> merged() const;

 private:
  struct alignas(64) Log {
    std::vector<TraceRecord> records;
    std::size_t size = 0;
    bool overflow = false;
  };
  std::vector<Log> logs_;
};

struct ExclusionViolation {
  TraceRecord first;
  TraceRecord second;
};

/// Pairs of time-overlapping records from different workers whose cells
/// are equal or stencil-adjacent. Sort-by-start sweep line. Intervals are half-open and
/// at least one tick long.
std::vector<ExclusionViolation> check_adjacency_exclusion(std::span<const TraceRecord> trace,
                                                          const Stencil& stencil,
                                                          const MeshShape& shape);

/// Edges (a -> b) for which some record of a ends after some record of b
/// starts. Edges naming tasks absent from the trace are ignored.
std::vector<taskrt::DependenceEdge> check_edge_order(std::span<const TraceRecord> trace,
                                                     std::span<const taskrt::DependenceEdge> edges);

/// Every interior cell written exactly `sweeps` times; returns offending
/// flat indices (empty when complete).
std::vector<std::size_t> check_write_counts(std::span<const TraceRecord> trace,
                                            const MeshShape& shape, std::size_t sweeps);

class IncompleteTraceError : public std::runtime_error {
 public:
  IncompleteTraceError(const std::string& what, std::vector<std::size_t> missing)
      : std::runtime_error(what), missing_(std::move(missing)) {}
  const std::vector<std::size_t>& missing() const { return missing_; }

 private:
  std::vector<std::size_t> missing_;
};

/// Worker that updated each interior cell in one sweep, indexed by
/// lexicographic interior rank.
struct AssignmentMap {
  MeshShape shape;
  std::vector<int> worker;

  int at(const CellCoord& c) const { return worker[shape.interior_rank(shape.index(c))]; }
};

/// The sweep-th update of every cell (by start time) picks its worker.
/// Throws IncompleteTraceError naming cells with fewer updates.
AssignmentMap build_assignment_map(std::span<const TraceRecord> trace, const MeshShape& shape,
                                   std::size_t sweep);

struct Rgb {
  std::uint8_t r, g, b;
};

/// 16-entry palette, indexed by worker id mod 16.
std::span<const Rgb> worker_palette();

/// Binary P6 image, one pixel per cell including the white halo. 3D maps
/// render the z-slice `slice` (default: middle).
std::string render_assignment_map(const AssignmentMap& map, std::optional<int> slice = {});

/// Within each colour class, every worker's cells form one contiguous run
/// of that class's lexicographic order. colour[rank] gives the class.
bool band_contiguity(const AssignmentMap& map, std::span<const int> colour);

/// `task worker cell start end` per line, decimal, space separated.
void write_trace_dump(std::ostream& out, std::span<const TraceRecord> trace);
std::vector<TraceRecord> read_trace_dump(std::istream& in);

}  // namespace stencillab
