#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stencillab/kernels.hpp"
#include "stencillab/strategies.hpp"
#include "stencillab/taskrt/schedule.hpp"
#include "stencillab/trace.hpp"

namespace stencillab {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A benchmark request; sizes and thread counts may list several points.
struct BenchConfig {
  int dim = 2;
  std::vector<int> sizes{16};
  StencilKind kind = StencilKind::FD5;
  CostModel cost = CostModel::constant(0);
  StrategyId strategy = StrategyId::Serial;
  std::vector<unsigned> threads{1};
  taskrt::Schedule schedule;
  std::size_t chunk = 1;
  std::size_t sweeps = 100;
  std::size_t reps = 3;
  std::uint64_t seed = 1;
  std::size_t warmup = 3;

  /// Throws ConfigError on an invalid value or combination.
  void validate() const;
};

/// One measured configuration; everything needed to rerun it.
struct BenchPoint {
  int dim = 2;
  int n = 0;
  StencilKind kind = StencilKind::FD5;
  CostModel cost = CostModel::constant(0);
  StrategyId strategy = StrategyId::Serial;
  unsigned threads = 1;
  taskrt::Schedule schedule;
  std::size_t chunk = 1;
  std::size_t sweeps = 1;

  std::size_t cell_updates() const;
  friend bool operator==(const BenchPoint&, const BenchPoint&) = default;
};

struct BenchResult {
  BenchPoint point;
  std::vector<double> seconds;         // one per repetition
  std::vector<std::uint64_t> digests;  // final mesh per repetition

  double ns_per_cell_update(double secs) const;
  double min_seconds() const;
  double median_seconds() const;
  double max_seconds() const;

  friend bool operator==(const BenchResult&, const BenchResult&) = default;
};

/// For every (n, T) point: seed the mesh, run `warmup` untimed sweeps,
/// time `sweeps` sweeps, repeat `reps` times. One runtime per point.
std::vector<BenchResult> run_benchmark(const BenchConfig& config,
                                       const std::function<void(const BenchResult&)>& on_point = {});

// ---- CSV ----------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "dim,n,stencil,cost,strategy,threads,schedule,chunk,sweeps,rep,seconds,ns_per_cell_update,"
    "digest";

void write_csv_header(std::ostream& out);
/// One row per repetition, then summary rows with rep "min", "median" and
/// "max". Summary rows carry the last repetition's digest.
void write_csv_rows(std::ostream& out, const BenchResult& result);
/// Inverse of the writer; throws std::runtime_error on malformed input.
std::vector<BenchResult> read_csv(std::istream& in);

std::string format_digest(std::uint64_t digest);

// ---- traced runs and verification ----------------------------------------

struct TracedRun {
  Mesh mesh;
  std::vector<TraceRecord> records;
  std::vector<taskrt::DependenceEdge> edges;
};

struct TracedRunSpec {
  StrategyConfig strategy;
  StencilKind kind = StencilKind::FD5;
  int n = 8;
  unsigned threads = 2;
  std::size_t sweeps = 1;
  std::uint64_t seed = 1;
  CostModel cost = CostModel::constant(0);
  Fault fault = Fault::None;
};

/// Runs with tracing and edge logging. Pass `runtime` to reuse threads;
/// its worker count must equal spec.threads.
TracedRun traced_run(const TracedRunSpec& spec, taskrt::TaskRuntime* runtime = nullptr);

/// Sweeps until residual_max < tol; nullopt if `budget` sweeps do not get
/// there.
std::optional<std::size_t> sweeps_to_converge(StrategyConfig strategy, StencilKind kind, int n,
                                              unsigned threads, double tol, std::size_t budget,
                                              std::uint64_t seed = 1);

/// Everything wrong with a traced run: exclusion, write counts, edge
/// order for task strategies, colour barriers, dissection post-order.
/// Empty when the run is clean.
std::vector<std::string> trace_problems(const TracedRunSpec& spec, const TracedRun& run);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool pass() const;
};

struct VerifyOptions {
  std::size_t reps = 10;
  std::vector<unsigned> threads{2, 4, 8};
  std::vector<int> sizes{8, 16, 32};
  Fault fault = Fault::None;
  CostModel cost = CostModel::constant(0);  // races suite only
};

/// Suites: races, deps, convergence, oracle, or all.
std::vector<SuiteReport> run_verification(std::string_view suite, const VerifyOptions& options,
                                          std::ostream* progress = nullptr);

SuiteReport verify_races(const VerifyOptions& options, std::ostream* progress = nullptr);
SuiteReport verify_deps();
SuiteReport verify_convergence();
SuiteReport verify_oracle();

}  // namespace stencillab
