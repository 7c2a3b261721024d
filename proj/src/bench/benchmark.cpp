#include <chrono>
#include <memory>

#include "stencillab/bench.hpp"

namespace stencillab {

using taskrt::RuntimeOptions;
using taskrt::TaskRuntime;

namespace {

std::unique_ptr<TaskRuntime> make_runtime(StrategyId strategy, unsigned threads,
                                          const MeshShape& shape) {
  if (strategy == StrategyId::Serial) return nullptr;
  RuntimeOptions opts;
  opts.workers = threads;
  opts.location_hint = shape.buffer_size();
  return std::make_unique<TaskRuntime>(opts);
}

}  // namespace

std::vector<BenchResult> run_benchmark(const BenchConfig& config,
                                       const std::function<void(const BenchResult&)>& on_point) {
  config.validate();
  std::vector<BenchResult> results;
  const StrategyConfig strategy{config.strategy, config.schedule, config.chunk};
  for (int n : config.sizes) {
    const MeshShape shape{config.dim, n};
    for (unsigned threads : config.threads) {
      BenchResult result;
      result.point = {config.dim,     n,        config.kind,  config.cost,  config.strategy,
                      threads,        config.schedule, config.chunk, config.sweeps};
      const Sweeper sweeper(strategy, shape, config.kind, threads);
      auto runtime = make_runtime(config.strategy, threads, shape);
      Mesh mesh(config.dim, n);
      for (std::size_t rep = 0; rep < config.reps; ++rep) {
        mesh.init(config.seed);
        SweepContext ctx(mesh, config.kind, config.cost, runtime.get());
        for (std::size_t w = 0; w < config.warmup; ++w) sweeper.sweep(ctx);
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t s = 0; s < config.sweeps; ++s) sweeper.sweep(ctx);
        const auto t1 = std::chrono::steady_clock::now();
        result.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        result.digests.push_back(digest(mesh));
      }
      if (on_point) on_point(result);
      results.push_back(std::move(result));
    }
  }
  return results;
}

TracedRun traced_run(const TracedRunSpec& spec, TaskRuntime* runtime) {
  const int dim = stencil_dim(spec.kind);
  TracedRun run{Mesh(dim, spec.n), {}, {}};
  run.mesh.init(spec.seed);
  const MeshShape& shape = run.mesh.shape();

  std::unique_ptr<TaskRuntime> own;
  if (runtime == nullptr) {
    own = make_runtime(spec.strategy.id, spec.threads, shape);
    runtime = own.get();
  } else if (runtime->workers() != spec.threads) {
    throw std::invalid_argument("runtime worker count differs from the traced run's");
  }
  const unsigned workers = runtime ? runtime->workers() : 1;

  ExecutionTrace trace(workers, spec.sweeps * shape.interior_count());
  SweepContext ctx(run.mesh, spec.kind, spec.cost, runtime, &trace);
  ctx.fault = spec.fault;
  const Sweeper sweeper(spec.strategy, shape, spec.kind, spec.threads);
  if (runtime) runtime->set_edge_log(&run.edges);
  try {
    for (std::size_t s = 0; s < spec.sweeps; ++s) sweeper.sweep(ctx);
  } catch (...) {
    if (runtime) runtime->set_edge_log(nullptr);
    throw;
  }
  if (runtime) runtime->set_edge_log(nullptr);
  run.records = trace.merged();
  return run;
}

std::optional<std::size_t> sweeps_to_converge(StrategyConfig strategy, StencilKind kind, int n,
                                              unsigned threads, double tol, std::size_t budget,
                                              std::uint64_t seed) {
  Mesh mesh(stencil_dim(kind), n);
  mesh.init(seed, 0.0);
  auto runtime = make_runtime(strategy.id, threads, mesh.shape());
  const Sweeper sweeper(strategy, mesh.shape(), kind, threads);
  SweepContext ctx(mesh, kind, CostModel::constant(0), runtime.get());
  const Stencil stencil(kind);
  for (std::size_t s = 1; s <= budget; ++s) {
    sweeper.sweep(ctx);
    if (residual_max(mesh, stencil) < tol) return s;
  }
  return std::nullopt;
}

}  // namespace stencillab
