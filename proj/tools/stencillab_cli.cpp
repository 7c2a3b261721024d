// stencillab run | trace | verify
//
// Exit codes: 0 success, 1 verification failure, 2 bad configuration.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stencillab/bench.hpp"

namespace sl = stencillab;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitConfig = 2;

struct RunArgs {
  int dim = 2;
  std::vector<int> sizes{16};
  std::string stencil = "fd5";
  std::string cost = "const:0";
  std::string strategy = "serial";
  std::vector<unsigned> threads{1};
  std::string schedule = "static";
  std::size_t chunk = 1;
  std::size_t sweeps = 100;
  std::size_t reps = 3;
  std::uint64_t seed = 1;
  std::size_t warmup = 3;
};

void add_run_options(CLI::App& cmd, RunArgs& a) {
  cmd.add_option("--dim", a.dim, "Mesh dimension (2 or 3)")->capture_default_str();
  cmd.add_option("--size", a.sizes, "Interior cells per axis; comma list")
      ->delimiter(',')
      ->capture_default_str();
  cmd.add_option("--stencil", a.stencil, "fd5, fe9, fd7 or fe27")->capture_default_str();
  cmd.add_option("--cost", a.cost, "const:<k> or ramp")->capture_default_str();
  cmd.add_option("--strategy", a.strategy,
                 "serial, colouring, nd, taskgraph, hyb-depend or hyb-sync")
      ->capture_default_str();
  cmd.add_option("--threads", a.threads, "Worker count; comma list")
      ->delimiter(',')
      ->capture_default_str();
  cmd.add_option("--schedule", a.schedule, "static or dynamic:<chunk>")->capture_default_str();
  cmd.add_option("--chunk", a.chunk, "Cells per task for task strategies")->capture_default_str();
  cmd.add_option("--sweeps", a.sweeps, "Timed sweeps per repetition")->capture_default_str();
  cmd.add_option("--reps", a.reps, "Repetitions")->capture_default_str();
  cmd.add_option("--seed", a.seed, "Initial-value seed")->capture_default_str();
  cmd.add_option("--warmup", a.warmup, "Untimed sweeps before timing")->capture_default_str();
}

sl::BenchConfig to_config(const RunArgs& a) {
  sl::BenchConfig c;
  c.dim = a.dim;
  c.sizes = a.sizes;
  auto kind = sl::parse_stencil(a.stencil);
  if (!kind) throw sl::ConfigError("unknown stencil '" + a.stencil + "'");
  c.kind = *kind;
  auto cost = sl::CostModel::parse(a.cost);
  if (!cost) throw sl::ConfigError("unknown cost '" + a.cost + "'");
  c.cost = *cost;
  auto strategy = sl::parse_strategy(a.strategy);
  if (!strategy) throw sl::ConfigError("unknown strategy '" + a.strategy + "'");
  c.strategy = *strategy;
  c.threads = a.threads;
  auto schedule = sl::taskrt::Schedule::parse(a.schedule);
  if (!schedule) throw sl::ConfigError("unknown schedule '" + a.schedule + "'");
  c.schedule = *schedule;
  c.chunk = a.chunk;
  c.sweeps = a.sweeps;
  c.reps = a.reps;
  c.seed = a.seed;
  c.warmup = a.warmup;
  c.validate();
  return c;
}

int cmd_run(const RunArgs& args, const std::string& csv_path) {
  const sl::BenchConfig config = to_config(args);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!csv_path.empty()) {
    file.open(csv_path);
    if (!file) throw sl::ConfigError("cannot write '" + csv_path + "'");
    out = &file;
  }
  sl::write_csv_header(*out);
  sl::run_benchmark(config, [&](const sl::BenchResult& r) {
    sl::write_csv_rows(*out, r);
    out->flush();
    std::cerr << sl::to_string(r.point.strategy) << " n=" << r.point.n
              << " T=" << r.point.threads << " median " << r.median_seconds() << " s, "
              << r.ns_per_cell_update(r.median_seconds()) << " ns/update\n";
  });
  return 0;
}

int cmd_trace(const RunArgs& args, const std::string& map_path, const std::string& dump_path,
              std::optional<std::size_t> map_sweep, std::optional<int> slice) {
  sl::BenchConfig config = to_config(args);
  if (config.sizes.size() != 1 || config.threads.size() != 1) {
    throw sl::ConfigError("trace takes a single --size and --threads");
  }
  sl::TracedRunSpec spec;
  spec.strategy = {config.strategy, config.schedule, config.chunk};
  spec.kind = config.kind;
  spec.n = config.sizes.front();
  spec.threads = config.threads.front();
  spec.sweeps = config.sweeps;
  spec.seed = config.seed;
  spec.cost = config.cost;
  if (map_sweep && *map_sweep >= spec.sweeps) {
    throw sl::ConfigError("--map-sweep must be below --sweeps");
  }
  if (slice && config.dim == 3 && (*slice < 1 || *slice > spec.n)) {
    throw sl::ConfigError("--z outside the mesh");
  }

  const sl::TracedRun run = sl::traced_run(spec);
  if (!dump_path.empty()) {
    std::ofstream out(dump_path);
    if (!out) throw sl::ConfigError("cannot write '" + dump_path + "'");
    sl::write_trace_dump(out, run.records);
  }
  if (!map_path.empty()) {
    const auto map =
        sl::build_assignment_map(run.records, run.mesh.shape(), map_sweep.value_or(spec.sweeps - 1));
    std::ofstream out(map_path, std::ios::binary);
    if (!out) throw sl::ConfigError("cannot write '" + map_path + "'");
    out << sl::render_assignment_map(map, slice);
  }

  const auto problems = sl::trace_problems(spec, run);
  std::cout << run.records.size() << " updates traced on " << spec.threads << " worker(s), "
            << run.edges.size() << " dependence edge(s)\n";
  for (const auto& p : problems) std::cout << "problem: " << p << '\n';
  return problems.empty() ? 0 : kExitVerify;
}

int cmd_verify(const std::string& suite, sl::VerifyOptions options, bool inject_fault) {
  if (inject_fault) {
    options.fault = sl::Fault::ColumnParity;
    if (options.cost == sl::CostModel::constant(0)) options.cost = sl::CostModel::constant(20);
  }
  const auto reports = sl::run_verification(suite, options, nullptr);
  bool ok = true;
  for (const auto& report : reports) {
    for (const auto& check : report.checks) {
      std::cout << (check.pass ? "PASS " : "FAIL ") << report.suite << ": " << check.name;
      if (!check.detail.empty()) std::cout << "  (" << check.detail << ')';
      std::cout << '\n';
    }
    std::cout << "suite " << report.suite << ": " << (report.pass() ? "PASS" : "FAIL") << '\n';
    ok = ok && report.pass();
  }
  return ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel Gauss-Seidel stencil sweeps: benchmark, trace and verify"};
  app.require_subcommand(1);

  RunArgs run_args;
  std::string csv_path;
  auto* run = app.add_subcommand("run", "Benchmark one strategy and write CSV");
  add_run_options(*run, run_args);
  run->add_option("--csv", csv_path, "Output file (default stdout)");

  RunArgs trace_args;
  trace_args.sweeps = 1;
  std::string map_path, dump_path;
  std::optional<std::size_t> map_sweep;
  std::optional<int> slice;
  auto* trace = app.add_subcommand("trace", "Run with tracing; write a worker map and dump");
  add_run_options(*trace, trace_args);
  trace->add_option("--map", map_path, "PPM worker-assignment image");
  trace->add_option("--dump", dump_path, "Text dump of all trace records");
  trace->add_option("--map-sweep", map_sweep, "Sweep shown in the map (default last)");
  trace->add_option("--z", slice, "z-slice for 3D maps (default middle)");

  std::string suite = "all";
  sl::VerifyOptions verify_options;
  bool inject_fault = false;
  std::string verify_cost = "const:0";
  auto* verify = app.add_subcommand("verify", "Run the correctness suites");
  verify->add_option("--suite", suite, "races, deps, convergence, oracle or all")
      ->check(CLI::IsMember({"races", "deps", "convergence", "oracle", "all"}))
      ->capture_default_str();
  verify->add_option("--reps", verify_options.reps, "Repetitions per race configuration")
      ->capture_default_str();
  verify->add_option("--threads", verify_options.threads, "Race-suite thread counts")
      ->delimiter(',');
  verify->add_option("--sizes", verify_options.sizes, "Race-suite mesh sizes")->delimiter(',');
  verify->add_option("--cost", verify_cost, "Race-suite cost model")->capture_default_str();
  // Test-only: breaks the colouring so the race checker has something to find.
  verify->add_flag("--inject-fault", inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args, csv_path);
    if (*trace) return cmd_trace(trace_args, map_path, dump_path, map_sweep, slice);
    auto cost = sl::CostModel::parse(verify_cost);
    if (!cost) throw sl::ConfigError("unknown cost '" + verify_cost + "'");
    verify_options.cost = *cost;
    return cmd_verify(suite, verify_options, inject_fault);
  } catch (const sl::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerify;
  }
}
