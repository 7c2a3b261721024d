#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "stencillab/bench.hpp"

namespace stencillab {

using taskrt::Schedule;
using taskrt::TaskRuntime;

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

constexpr std::array<StencilKind, 4> kKinds{StencilKind::FD5, StencilKind::FE9, StencilKind::FD7,
                                            StencilKind::FE27};

std::string describe(const TracedRunSpec& s) {
  std::ostringstream o;
  o << to_string(s.strategy.id) << ' ' << to_string(s.kind) << " n=" << s.n << " T=" << s.threads
    << " schedule=" << s.strategy.schedule.to_string() << " seed=" << s.seed;
  return o.str();
}

// start/end of every cell's s-th update, indexed [sweep][flat].
struct SweepTimes {
  std::vector<std::vector<std::int64_t>> start, end;
};

SweepTimes per_sweep_times(const std::vector<TraceRecord>& records, const MeshShape& shape,
                           std::size_t sweeps) {
  SweepTimes t;
  t.start.assign(sweeps, std::vector<std::int64_t>(shape.buffer_size(), 0));
  t.end = t.start;
  std::vector<std::size_t> seen(shape.buffer_size(), 0);
  for (const auto& r : records) {  // sorted by start
    const std::size_t s = seen[r.cell]++;
    if (s >= sweeps) continue;
    t.start[s][r.cell] = r.start;
    t.end[s][r.cell] = r.end;
  }
  return t;
}

// Colour passes must not overlap: every update of pass p ends before any
// update of pass p+1 starts, sweep after sweep.
void check_colour_barriers(const TracedRunSpec& spec, const TracedRun& run, const SweepTimes& t,
                           std::vector<std::string>& problems) {
  const MeshShape& shape = run.mesh.shape();
  const int colours = colour_count(spec.kind);
  const auto cells = interior_cells(shape);
  std::int64_t prev_end = std::numeric_limits<std::int64_t>::min();
  for (std::size_t s = 0; s < spec.sweeps; ++s) {
    for (int p = 0; p < colours; ++p) {
      std::int64_t lo = std::numeric_limits<std::int64_t>::max();
      std::int64_t hi = std::numeric_limits<std::int64_t>::min();
      for (const CellCoord& c : cells) {
        if (colour_of(spec.kind, c) != p) continue;
        const std::size_t f = shape.index(c);
        lo = std::min(lo, t.start[s][f]);
        hi = std::max(hi, t.end[s][f]);
      }
      if (lo == std::numeric_limits<std::int64_t>::max()) continue;
      if (lo < prev_end) {
        problems.push_back("colour " + std::to_string(p) + " of sweep " + std::to_string(s) +
                           " started before the previous colour finished");
      }
      prev_end = hi;
    }
  }
}

std::vector<std::int64_t> check_dissection_node(const DissectionNode& node, const MeshShape& shape,
                                                const SweepTimes& t, std::size_t sweeps,
                                                std::vector<std::string>& problems) {
  std::vector<std::int64_t> child_end(sweeps, std::numeric_limits<std::int64_t>::min());
  for (const auto& child : node.children) {
    auto e = check_dissection_node(child, shape, t, sweeps, problems);
    for (std::size_t s = 0; s < sweeps; ++s) child_end[s] = std::max(child_end[s], e[s]);
  }
  std::vector<std::int64_t> subtree_end = child_end;
  for (const CellCoord& c : node.own_cells()) {
    const std::size_t f = shape.index(c);
    for (std::size_t s = 0; s < sweeps; ++s) {
      if (!node.leaf() && t.start[s][f] < child_end[s]) {
        problems.push_back("separator cell " + std::to_string(f) + " of a depth-" +
                           std::to_string(node.depth) + " node started before its blocks ended");
      }
      subtree_end[s] = std::max(subtree_end[s], t.end[s][f]);
    }
  }
  return subtree_end;
}

}  // namespace

std::vector<std::string> trace_problems(const TracedRunSpec& spec, const TracedRun& run) {
  std::vector<std::string> problems;
  const MeshShape& shape = run.mesh.shape();
  const Stencil stencil(spec.kind);

  const auto violations = check_adjacency_exclusion(run.records, stencil, shape);
  if (!violations.empty()) {
    const auto& v = violations.front();
    problems.push_back(std::to_string(violations.size()) +
                       " exclusion violation(s), first: cells " + std::to_string(v.first.cell) +
                       " and " + std::to_string(v.second.cell) + " on workers " +
                       std::to_string(v.first.worker) + "/" + std::to_string(v.second.worker));
  }
  const std::size_t expected = spec.sweeps * shape.interior_count();
  if (run.records.size() != expected) {
    problems.push_back("trace holds " + std::to_string(run.records.size()) + " records, expected " +
                       std::to_string(expected));
  }
  const auto bad_counts = check_write_counts(run.records, shape, spec.sweeps);
  if (!bad_counts.empty()) {
    problems.push_back(std::to_string(bad_counts.size()) + " cell(s) with wrong write count");
  }
  for (const auto& r : run.records) {
    if (r.start > r.end) {
      problems.push_back("record with end before start");
      break;
    }
  }

  const StrategyId id = spec.strategy.id;
  if (id == StrategyId::Taskgraph || id == StrategyId::HybDepend) {
    const auto late = check_edge_order(run.records, run.edges);
    if (!late.empty()) {
      problems.push_back(std::to_string(late.size()) + " dependence edge(s) violated, first " +
                         std::to_string(late.front().from) + "->" +
                         std::to_string(late.front().to));
    }
  }
  if (id == StrategyId::Colouring || id == StrategyId::HybSync ||
      id == StrategyId::NestedDissection) {
    const SweepTimes t = per_sweep_times(run.records, shape, spec.sweeps);
    if (id == StrategyId::NestedDissection) {
      const auto tree = dissect(Box::whole(shape), spec.threads, shape.dim);
      check_dissection_node(tree, shape, t, spec.sweeps, problems);
    } else if (spec.fault == Fault::None) {
      check_colour_barriers(spec, run, t, problems);
    }
  }
  return problems;
}

SuiteReport verify_races(const VerifyOptions& options, std::ostream* progress) {
  SuiteReport report{"races", {}};
  for (StrategyId id : kAllStrategies) {
    for (StencilKind kind : kKinds) {
      for (unsigned threads : options.threads) {
        for (int n : options.sizes) {
          TracedRunSpec spec;
          spec.strategy = {id, Schedule::static_split(), 1};
          spec.kind = kind;
          spec.n = n;
          spec.threads = threads;
          spec.sweeps = 2;
          spec.fault = options.fault;
          spec.cost = options.cost;
          std::unique_ptr<TaskRuntime> rt;
          if (id != StrategyId::Serial) rt = std::make_unique<TaskRuntime>(threads);
          CheckResult check{"", true, ""};
          for (std::size_t rep = 0; rep < options.reps; ++rep) {
            spec.seed = rep + 1;
            // Alternate schedules across repetitions for the loop strategies.
            spec.strategy.schedule =
                rep % 2 == 0 ? Schedule::static_split() : Schedule::dynamic(1);
            const TracedRun run = traced_run(spec, rt.get());
            const auto problems = trace_problems(spec, run);
            if (!problems.empty()) {
              check.pass = false;
              check.detail = describe(spec) + ": " + problems.front();
              break;
            }
          }
          spec.seed = 1;
          check.name = std::string(to_string(id)) + " " + std::string(to_string(kind)) +
                       " T=" + std::to_string(threads) + " n=" + std::to_string(n);
          if (progress) {
            *progress << (check.pass ? "PASS " : "FAIL ") << check.name
                      << (check.pass ? "" : "  " + check.detail) << std::endl;
          }
          report.checks.push_back(std::move(check));
        }
      }
    }
  }
  return report;
}

namespace {

std::vector<taskrt::DependenceEdge> edges_of(const TaskPlan& plan) {
  return taskrt::tracker_edges(plan.records());
}

}  // namespace

SuiteReport verify_deps() {
  SuiteReport report{"deps", {}};
  std::size_t compared = 0;
  std::string mismatch;
  for (StencilKind kind : kKinds) {
    const int dim = stencil_dim(kind);
    const int max_n = dim == 2 ? 6 : 4;
    for (int n = 1; n <= max_n && mismatch.empty(); ++n) {
      const MeshShape shape{dim, n};
      for (const TaskPlan& plan : {taskgraph_plan(shape, kind), hyb_depend_plan(shape, kind)}) {
        const auto records = plan.records();
        if (taskrt::tracker_edges(records) != taskrt::oracle_edges(records)) {
          mismatch = std::string(to_string(kind)) + " n=" + std::to_string(n);
          break;
        }
        ++compared;
      }
    }
  }
  report.checks.push_back({"tracker edges equal oracle edges", mismatch.empty(),
                           mismatch.empty() ? std::to_string(compared) + " submissions compared"
                                            : "mismatch at " + mismatch});

  {
    // 3x3 FD5, lexicographic: predecessors are exactly west and north.
    const MeshShape shape{2, 3};
    const auto records = taskgraph_plan(shape, StencilKind::FD5).records();
    const auto edges = taskrt::oracle_edges(records);
    bool ok = edges == taskrt::tracker_edges(records);
    const auto cells = interior_cells(shape);
    for (std::size_t t = 0; t < cells.size() && ok; ++t) {
      std::vector<taskrt::TaskId> preds;
      for (const auto& e : edges)
        if (e.to == t + 1) preds.push_back(e.from);
      std::vector<taskrt::TaskId> want;
      const int x = cells[t][0], y = cells[t][1];
      if (y > 1) want.push_back(t + 1 - 3);
      if (x > 1) want.push_back(t);
      std::sort(want.begin(), want.end());
      ok = preds == want;
    }
    report.checks.push_back({"3x3 FD5 wavefront predecessors", ok, ""});
  }

  {
    bool ok = true;
    std::string detail;
    for (int n : {4, 6, 8}) {
      const MeshShape shape{2, n};
      const auto edges = edges_of(hyb_depend_plan(shape, StencilKind::FD5));
      const auto head = static_cast<taskrt::TaskId>((n * n + 1) / 2);
      bool head_free = std::none_of(edges.begin(), edges.end(),
                                    [&](const auto& e) { return e.to <= head; });
      bool tail_blocked = true;
      for (taskrt::TaskId t = head + 1; t <= static_cast<taskrt::TaskId>(n * n); ++t) {
        tail_blocked &= std::any_of(edges.begin(), edges.end(),
                                    [&](const auto& e) { return e.to == t && e.from <= head; });
      }
      if (!head_free || !tail_blocked) {
        ok = false;
        detail += " fd5 n=" + std::to_string(n);
      }
    }
    for (int n : {4, 6, 8}) {
      const MeshShape shape{2, n};
      const auto first = colour_cells(shape, StencilKind::FE9, 0).size();
      const auto edges = edges_of(hyb_depend_plan(shape, StencilKind::FE9));
      if (std::any_of(edges.begin(), edges.end(), [&](const auto& e) { return e.to <= first; })) {
        ok = false;
        detail += " fe9 n=" + std::to_string(n);
      }
    }
    report.checks.push_back({"hyb-depend first colour has no predecessors", ok, detail});
  }
  return report;
}

SuiteReport verify_convergence() {
  SuiteReport report{"convergence", {}};
  constexpr double kTol = 1e-8;
  const std::vector<std::pair<StencilKind, int>> cases{{StencilKind::FD5, 33},
                                                       {StencilKind::FD7, 17}};
  for (const auto& [kind, n] : cases) {
    const auto serial =
        sweeps_to_converge({StrategyId::Serial, {}, 1}, kind, n, 1, kTol, 100'000);
    const std::string where = std::string(to_string(kind)) + " n=" + std::to_string(n);
    if (!serial) {
      report.checks.push_back({"serial " + where, false, "did not converge"});
      continue;
    }
    report.checks.push_back({"serial " + where, true, std::to_string(*serial) + " sweeps"});
    const std::size_t budget = 2 * *serial;
    for (StrategyId id : kAllStrategies) {
      if (id == StrategyId::Serial) continue;
      const auto count = sweeps_to_converge({id, Schedule::static_split(), 1}, kind, n, 4, kTol, budget);
      report.checks.push_back({std::string(to_string(id)) + " " + where, count.has_value(),
                               count ? std::to_string(*count) + " sweeps (budget " +
                                           std::to_string(budget) + ")"
                                     : "exceeded budget " + std::to_string(budget)});
    }
  }
  return report;
}

namespace {

// Serial references written against the raw definitions, not the loop
// nests the strategies use.
void reference_sweep(Mesh& mesh, StencilKind kind, bool by_colour) {
  auto cells = interior_cells(mesh.shape());
  if (by_colour) {
    std::stable_sort(cells.begin(), cells.end(), [kind](const CellCoord& a, const CellCoord& b) {
      return colour_of(kind, a) < colour_of(kind, b);
    });
  }
  const BoundStencil bound(Stencil(kind), mesh.shape());
  for (const CellCoord& c : cells) update_cell(mesh, bound, mesh.index(c), 0);
}

}  // namespace

SuiteReport verify_oracle() {
  SuiteReport report{"oracle", {}};
  constexpr std::size_t kSweeps = 4;
  for (StencilKind kind : kKinds) {
    for (int n : {5, 8, 13}) {
      const int dim = stencil_dim(kind);
      Mesh colour_ref(dim, n), lex_ref(dim, n);
      colour_ref.init(42);
      lex_ref.init(42);
      for (std::size_t s = 0; s < kSweeps; ++s) {
        reference_sweep(colour_ref, kind, true);
        reference_sweep(lex_ref, kind, false);
      }
      struct Case {
        StrategyId id;
        Schedule schedule;
        const Mesh* expect;
      };
      const std::vector<Case> cases{
          {StrategyId::Serial, {}, &lex_ref},
          {StrategyId::Colouring, Schedule::static_split(), &colour_ref},
          {StrategyId::Colouring, Schedule::dynamic(1), &colour_ref},
          {StrategyId::HybSync, Schedule::static_split(), &colour_ref},
          {StrategyId::HybSync, Schedule::dynamic(2), &colour_ref},
          {StrategyId::Taskgraph, {}, &lex_ref},
          {StrategyId::HybDepend, {}, &colour_ref},
      };
      for (const Case& c : cases) {
        for (unsigned threads : {1U, 4U}) {
          Mesh mesh(dim, n);
          mesh.init(42);
          std::unique_ptr<TaskRuntime> rt;
          if (c.id != StrategyId::Serial) rt = std::make_unique<TaskRuntime>(threads);
          const Sweeper sweeper({c.id, c.schedule, 1}, mesh.shape(), kind, threads);
          SweepContext ctx(mesh, kind, CostModel::constant(0), rt.get());
          for (std::size_t s = 0; s < kSweeps; ++s) sweeper.sweep(ctx);
          const bool same = mesh == *c.expect;
          report.checks.push_back({std::string(to_string(c.id)) + " " +
                                       c.schedule.to_string() + " " +
                                       std::string(to_string(kind)) + " n=" + std::to_string(n) +
                                       " T=" + std::to_string(threads),
                                   same, same ? "" : "differs from the serial reference order"});
        }
      }
    }
  }
  return report;
}

std::vector<SuiteReport> run_verification(std::string_view suite, const VerifyOptions& options,
                                          std::ostream* progress) {
  std::vector<SuiteReport> out;
  const bool all = suite == "all";
  if (all || suite == "deps") out.push_back(verify_deps());
  if (all || suite == "oracle") out.push_back(verify_oracle());
  if (all || suite == "convergence") out.push_back(verify_convergence());
  if (all || suite == "races") out.push_back(verify_races(options, progress));
  if (out.empty()) throw ConfigError("unknown suite '" + std::string(suite) + "'");
  return out;
}

}  // namespace stencillab
