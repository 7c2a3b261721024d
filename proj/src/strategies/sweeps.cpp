#include <algorithm>
#include <stdexcept>

#include "colour_loops.hpp"
#include "stencillab/strategies.hpp"

namespace stencillab {

using taskrt::Schedule;
using taskrt::TaskGroup;
using taskrt::TaskRuntime;

std::string_view to_string(StrategyId id) {
  switch (id) {
    case StrategyId::Serial: return "serial";
    case StrategyId::Colouring: return "colouring";
    case StrategyId::NestedDissection: return "nd";
    case StrategyId::Taskgraph: return "taskgraph";
    case StrategyId::HybDepend: return "hyb-depend";
    case StrategyId::HybSync: return "hyb-sync";
  }
  return "?";
}

std::optional<StrategyId> parse_strategy(std::string_view text) {
  for (StrategyId id : kAllStrategies)
    if (text == to_string(id)) return id;
  return std::nullopt;
}

void apply_update(SweepContext& ctx, std::size_t flat) {
  const MeshShape& shape = ctx.mesh.shape();
  const int k = ctx.cost.is_ramp() ? ctx.cost.k(shape.interior_rank(flat), shape.interior_count())
                                   : ctx.cost.constant_k();
  if (ctx.trace == nullptr) {
    update_cell(ctx.mesh, ctx.stencil, flat, k);
    return;
  }
  const unsigned worker = ctx.runtime ? ctx.runtime->worker_index() : 0;
  const std::int64_t start = ExecutionTrace::now_ns();
  update_cell(ctx.mesh, ctx.stencil, flat, k);
  // A coarse clock can return equal stamps; records keep start < end.
  const std::int64_t end = std::max(ExecutionTrace::now_ns(), start + 1);
  ctx.trace->record({TaskRuntime::current_task(), worker, flat, start, end});
}

void sweep_serial(SweepContext& ctx) {
  const MeshShape& shape = ctx.mesh.shape();
  const int n = shape.n;
  const std::size_t p = shape.padded();
  const int nz = shape.dim == 3 ? n : 1;
  for (int z = shape.dim == 3 ? 1 : 0; z <= (shape.dim == 3 ? nz : 0); ++z) {
    for (int y = 1; y <= n; ++y) {
      const std::size_t row = (static_cast<std::size_t>(z) * p + static_cast<std::size_t>(y)) * p;
      for (int x = 1; x <= n; ++x) apply_update(ctx, row + static_cast<std::size_t>(x));
    }
  }
}

void sweep_colouring(SweepContext& ctx, Schedule schedule) {
  const StencilKind kind = ctx.stencil.stencil().kind();
  for (int colour = 0; colour < colour_count(kind); ++colour) {
    const detail::ColourLoop loop(ctx.mesh.shape(), kind, colour, ctx.fault);
    auto visit = [&ctx](std::size_t flat) { apply_update(ctx, flat); };
    if (ctx.runtime == nullptr) {
      loop.visit_rows(0, loop.rows(), visit);
      continue;
    }
    ctx.runtime->parallel_for({0, loop.rows()}, schedule,
                              [&](std::size_t b, std::size_t e) { loop.visit_rows(b, e, visit); });
  }
}

void sweep_hyb_sync(SweepContext& ctx, Schedule schedule) {
  if (ctx.runtime == nullptr) throw std::invalid_argument("hyb-sync needs a task runtime");
  TaskRuntime& rt = *ctx.runtime;
  const StencilKind kind = ctx.stencil.stencil().kind();
  SweepContext* shared = &ctx;
  for (int colour = 0; colour < colour_count(kind); ++colour) {
    const detail::ColourLoop loop(ctx.mesh.shape(), kind, colour, ctx.fault);
    rt.parallel_for({0, loop.rows()}, schedule, [&](std::size_t b, std::size_t e) {
      loop.visit_rows(b, e, [&](std::size_t flat) {
        rt.spawn([shared, flat] { apply_update(*shared, flat); });
      });
    });
    rt.taskwait();
  }
}

namespace {

void run_dissection_node(SweepContext* ctx, const FlatDissection* node) {
  if (!node->children.empty()) {
    if (ctx->runtime == nullptr) {
      for (const auto& child : node->children) run_dissection_node(ctx, &child);
    } else {
      TaskGroup group;
      for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) {
        const FlatDissection* child = &*it;
        ctx->runtime->spawn([ctx, child] { run_dissection_node(ctx, child); }, &group);
      }
      ctx->runtime->wait(group);
    }
  }
  for (std::size_t flat : node->cells) apply_update(*ctx, flat);
}

}  // namespace

void sweep_nested_dissection(SweepContext& ctx, const FlatDissection& tree) {
  run_dissection_node(&ctx, &tree);
  if (ctx.runtime) ctx.runtime->taskwait();
}

void sweep_nested_dissection(SweepContext& ctx, const DissectionNode& tree) {
  sweep_nested_dissection(ctx, flatten(tree, ctx.mesh.shape()));
}

TaskPlan make_task_plan(const MeshShape& shape, const Stencil& stencil,
                        std::span<const std::size_t> order, std::size_t chunk,
                        std::span<const std::size_t> breaks) {
  if (chunk == 0) throw std::invalid_argument("task chunk must be at least 1");
  const BoundStencil bound(stencil, shape);
  TaskPlan plan;
  plan.cells.assign(order.begin(), order.end());
  plan.out = plan.cells;
  plan.in_begin.push_back(0);

  std::vector<std::size_t> cuts(breaks.begin(), breaks.end());
  cuts.push_back(order.size());
  std::sort(cuts.begin(), cuts.end());

  std::size_t at = 0;
  std::vector<taskrt::Location> reads;
  for (std::size_t cut : cuts) {
    while (at < cut) {
      const std::size_t end = std::min(at + chunk, cut);
      plan.task_begin.push_back(at);
      reads.clear();
      for (std::size_t i = at; i < end; ++i) {
        for (int j = 0; j < bound.size(); ++j) {
          reads.push_back(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(order[i]) +
                                                   bound.flat_offset(j)));
        }
      }
      std::sort(reads.begin(), reads.end());
      reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
      for (taskrt::Location loc : reads) {
        if (std::find(order.begin() + static_cast<std::ptrdiff_t>(at),
                      order.begin() + static_cast<std::ptrdiff_t>(end), loc) ==
            order.begin() + static_cast<std::ptrdiff_t>(end)) {
          plan.in.push_back(loc);
        }
      }
      plan.in_begin.push_back(plan.in.size());
      at = end;
    }
  }
  plan.task_begin.push_back(order.size());
  return plan;
}

std::vector<taskrt::TaskRecord> TaskPlan::records(taskrt::TaskId first_id) const {
  std::vector<taskrt::TaskRecord> out;
  for (std::size_t t = 0; t < tasks(); ++t) {
    taskrt::TaskRecord r;
    r.id = first_id + t;
    r.out.assign(cells.begin() + static_cast<std::ptrdiff_t>(task_begin[t]),
                 cells.begin() + static_cast<std::ptrdiff_t>(task_begin[t + 1]));
    r.in.assign(in.begin() + static_cast<std::ptrdiff_t>(in_begin[t]),
                in.begin() + static_cast<std::ptrdiff_t>(in_begin[t + 1]));
    out.push_back(std::move(r));
  }
  return out;
}

TaskPlan taskgraph_plan(const MeshShape& shape, StencilKind kind, std::size_t chunk) {
  const auto order = lexicographic_order(shape);
  return make_task_plan(shape, Stencil(kind), order, chunk);
}

TaskPlan hyb_depend_plan(const MeshShape& shape, StencilKind kind, std::size_t chunk) {
  std::vector<std::size_t> order;
  std::vector<std::size_t> breaks;
  for (int p = 0; p < colour_count(kind); ++p) {
    auto cells = colour_cells(shape, kind, p);
    order.insert(order.end(), cells.begin(), cells.end());
    breaks.push_back(order.size());
  }
  return make_task_plan(shape, Stencil(kind), order, chunk, breaks);
}

void submit_plan(SweepContext& ctx, const TaskPlan& plan) {
  if (ctx.runtime == nullptr) throw std::invalid_argument("task sweeps need a task runtime");
  SweepContext* shared = &ctx;
  const TaskPlan* p = &plan;
  for (std::size_t t = 0; t < plan.tasks(); ++t) {
    const std::span<const taskrt::Location> in(plan.in.data() + plan.in_begin[t],
                                               plan.in_begin[t + 1] - plan.in_begin[t]);
    const std::span<const taskrt::Location> out(plan.out.data() + plan.task_begin[t],
                                                plan.task_begin[t + 1] - plan.task_begin[t]);
    ctx.runtime->submit(
        [shared, p, t] {
          for (std::size_t i = p->task_begin[t]; i < p->task_begin[t + 1]; ++i) {
            apply_update(*shared, p->cells[i]);
          }
        },
        in, out);
  }
  ctx.runtime->taskwait();
}

void sweep_taskgraph(SweepContext& ctx, std::size_t chunk) {
  submit_plan(ctx, taskgraph_plan(ctx.mesh.shape(), ctx.stencil.stencil().kind(), chunk));
}

void sweep_hyb_depend(SweepContext& ctx, std::size_t chunk) {
  submit_plan(ctx, hyb_depend_plan(ctx.mesh.shape(), ctx.stencil.stencil().kind(), chunk));
}

Sweeper::Sweeper(StrategyConfig config, const MeshShape& shape, StencilKind kind,
                 unsigned threads)
    : config_(config), shape_(shape), kind_(kind) {
  if (stencil_dim(kind) != shape.dim) {
    throw std::invalid_argument(std::string(to_string(kind)) + " does not fit a " +
                                std::to_string(shape.dim) + "D mesh");
  }
  switch (config.id) {
    case StrategyId::NestedDissection:
      tree_ = flatten(dissect(Box::whole(shape), threads, shape.dim), shape);
      break;
    case StrategyId::Taskgraph:
      plan_ = taskgraph_plan(shape, kind, config.chunk);
      break;
    case StrategyId::HybDepend:
      plan_ = hyb_depend_plan(shape, kind, config.chunk);
      break;
    default:
      break;
  }
}

bool Sweeper::uses_tasks() const {
  return config_.id != StrategyId::Serial && config_.id != StrategyId::Colouring;
}

void Sweeper::sweep(SweepContext& ctx) const {
  if (!(ctx.mesh.shape() == shape_) || ctx.stencil.stencil().kind() != kind_) {
    throw std::invalid_argument("sweep context does not match the prepared strategy");
  }
  switch (config_.id) {
    case StrategyId::Serial: sweep_serial(ctx); break;
    case StrategyId::Colouring: sweep_colouring(ctx, config_.schedule); break;
    case StrategyId::NestedDissection: sweep_nested_dissection(ctx, *tree_); break;
    case StrategyId::Taskgraph:
    case StrategyId::HybDepend: submit_plan(ctx, *plan_); break;
    case StrategyId::HybSync: sweep_hyb_sync(ctx, config_.schedule); break;
  }
}

}  // namespace stencillab
