#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stencillab/kernels.hpp"
#include "stencillab/mesh.hpp"
#include "stencillab/taskrt/runtime.hpp"
#include "stencillab/trace.hpp"

namespace stencillab {

enum class StrategyId { Serial, Colouring, NestedDissection, Taskgraph, HybDepend, HybSync };

std::string_view to_string(StrategyId id);  // serial, colouring, nd, taskgraph, hyb-depend, hyb-sync
std::optional<StrategyId> parse_strategy(std::string_view text);
inline constexpr std::array<StrategyId, 6> kAllStrategies{
    StrategyId::Serial,    StrategyId::Colouring, StrategyId::NestedDissection,
    StrategyId::Taskgraph, StrategyId::HybDepend, StrategyId::HybSync};

struct StrategyConfig {
  StrategyId id = StrategyId::Serial;
  taskrt::Schedule schedule;  // colouring and hyb-sync
  std::size_t chunk = 1;      // cells per task for taskgraph and hyb-depend
};

// ---- colouring --------------------------------------------------------

/// 2 for the face-neighbour stencils, 2^d for the full ones.
int colour_count(StencilKind kind);

/// Coordinate-sum parity for FD5/FD7; per-axis parity bits for FE9/FE27.
int colour_of(StencilKind kind, const CellCoord& c);

/// Flat indices of one colour in the order the colour loop nest visits
/// them (lexicographic, outer axis slowest).
std::vector<std::size_t> colour_cells(const MeshShape& shape, StencilKind kind, int colour);

/// All colours concatenated, colour 0 first.
std::vector<std::size_t> colour_major_order(const MeshShape& shape, StencilKind kind);

/// Interior flat indices, lexicographic.
std::vector<std::size_t> lexicographic_order(const MeshShape& shape);

// ---- nested dissection ------------------------------------------------

/// Inclusive axis-aligned box of interior coordinates.
struct Box {
  int dim = 2;
  std::array<int, 3> lo{1, 1, 1};
  std::array<int, 3> hi{0, 0, 0};

  bool empty() const;
  std::size_t count() const;
  int extent(int axis) const { return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)] + 1; }
  bool contains(const CellCoord& c) const;
  static Box whole(const MeshShape& shape);
};

struct DissectionNode {
  Box region;
  int depth = 0;
  std::array<int, 3> mid{};  // meaningful for internal nodes only
  /// 2^dim children in octant order (bit a set = upper half on axis a);
  /// empty for leaves.
  std::vector<DissectionNode> children;

  bool leaf() const { return children.empty(); }
  /// Cells of the region on some axis midpoint, lexicographic. Empty for
  /// leaves.
  std::vector<CellCoord> separator() const;
  /// Leaf: whole region. Internal: separator. Lexicographic.
  std::vector<CellCoord> own_cells() const;
  std::size_t leaf_count() const;
  int height() const;
};

/// A dissection tree with each node's own cells as flat indices, ready
/// to sweep.
struct FlatDissection {
  std::vector<std::size_t> cells;
  std::vector<FlatDissection> children;
};

FlatDissection flatten(const DissectionNode& node, const MeshShape& shape);

/// Levels of splitting for T threads: the first L with 2^(dim L) >= T,
/// plus one.
int dissection_levels(unsigned threads, int dim);

/// Recursive 2^dim split at mid = lo + floor(extent/2). Regions with an
/// extent of 2 or less on any axis stay leaves.
DissectionNode dissect(const Box& region, unsigned threads, int dim);

// ---- sweeps -------------------------------------------------------------

enum class Fault {
  None,
  /// Colour passes select cells by x parity only, so vertically adjacent
  /// cells share a pass. Negative control for the race checker.
  ColumnParity,
};

/// What a single sweep updates and where it reports.
struct SweepContext {
  SweepContext(Mesh& m, StencilKind kind, CostModel c, taskrt::TaskRuntime* rt = nullptr,
               ExecutionTrace* tr = nullptr)
      : mesh(m), stencil(Stencil(kind), m.shape()), cost(c), runtime(rt), trace(tr) {}

  Mesh& mesh;
  BoundStencil stencil;
  CostModel cost;
  taskrt::TaskRuntime* runtime = nullptr;
  ExecutionTrace* trace = nullptr;
  Fault fault = Fault::None;
};

/// Updates one interior cell, tracing it when the context asks.
void apply_update(SweepContext& ctx, std::size_t flat);

void sweep_serial(SweepContext& ctx);
void sweep_colouring(SweepContext& ctx, taskrt::Schedule schedule);
void sweep_hyb_sync(SweepContext& ctx, taskrt::Schedule schedule);
/// Post-order: children as tasks, scoped wait, then the node's separator
/// serially. Children are spawned last-first so one worker runs them in
/// octant order.
void sweep_nested_dissection(SweepContext& ctx, const FlatDissection& tree);
void sweep_nested_dissection(SweepContext& ctx, const DissectionNode& tree);
/// Per-cell (or per-chunk) tasks with in/out dependences, lexicographic.
void sweep_taskgraph(SweepContext& ctx, std::size_t chunk = 1);
/// Same tasks and dependences, submitted colour by colour.
void sweep_hyb_depend(SweepContext& ctx, std::size_t chunk = 1);

/// Task list of a dependence-driven sweep: cells grouped into tasks with
/// their declared accesses. Neighbour reads include halo locations.
struct TaskPlan {
  std::vector<std::size_t> cells;        // all cells in submission order
  std::vector<std::size_t> task_begin;   // task t owns cells[task_begin[t] .. task_begin[t+1])
  std::vector<std::size_t> in_begin;     // same layout over `in`
  std::vector<taskrt::Location> in;
  std::vector<taskrt::Location> out;     // == cells

  std::size_t tasks() const { return task_begin.size() - 1; }
  std::vector<taskrt::TaskRecord> records(taskrt::TaskId first_id = 1) const;
};

/// `order` is split into runs of `chunk` cells; a run never crosses a
/// boundary listed in `breaks` (offsets into order).
TaskPlan make_task_plan(const MeshShape& shape, const Stencil& stencil,
                        std::span<const std::size_t> order, std::size_t chunk,
                        std::span<const std::size_t> breaks = {});

TaskPlan taskgraph_plan(const MeshShape& shape, StencilKind kind, std::size_t chunk = 1);
TaskPlan hyb_depend_plan(const MeshShape& shape, StencilKind kind, std::size_t chunk = 1);

void submit_plan(SweepContext& ctx, const TaskPlan& plan);

/// A strategy bound to a mesh shape, stencil and thread count, with its
/// orders and trees computed once and reused by every sweep.
class Sweeper {
 public:
  Sweeper(StrategyConfig config, const MeshShape& shape, StencilKind kind, unsigned threads);

  const StrategyConfig& config() const { return config_; }
  bool uses_tasks() const;

  /// One full sweep. Task strategies end with a taskwait.
  void sweep(SweepContext& ctx) const;

 private:
  StrategyConfig config_;
  MeshShape shape_;
  StencilKind kind_;
  std::optional<FlatDissection> tree_;
  std::optional<TaskPlan> plan_;
};

}  // namespace stencillab
