#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stencillab/bench.hpp"

namespace py = pybind11;
namespace sl = stencillab;

namespace {

sl::StencilKind stencil_arg(const std::string& name) {
  auto k = sl::parse_stencil(name);
  if (!k) throw sl::ConfigError("unknown stencil '" + name + "'");
  return *k;
}

sl::StrategyId strategy_arg(const std::string& name) {
  auto s = sl::parse_strategy(name);
  if (!s) throw sl::ConfigError("unknown strategy '" + name + "'");
  return *s;
}

sl::CostModel cost_arg(const std::string& text) {
  auto c = sl::CostModel::parse(text);
  if (!c) throw sl::ConfigError("unknown cost '" + text + "'");
  return *c;
}

sl::taskrt::Schedule schedule_arg(const std::string& text) {
  auto s = sl::taskrt::Schedule::parse(text);
  if (!s) throw sl::ConfigError("unknown schedule '" + text + "'");
  return *s;
}

py::dict point_dict(const sl::BenchPoint& p) {
  py::dict d;
  d["dim"] = p.dim;
  d["n"] = p.n;
  d["stencil"] = std::string(sl::to_string(p.kind));
  d["cost"] = p.cost.to_string();
  d["strategy"] = std::string(sl::to_string(p.strategy));
  d["threads"] = p.threads;
  d["schedule"] = p.schedule.to_string();
  d["chunk"] = p.chunk;
  d["sweeps"] = p.sweeps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_stencillab, m) {
  m.doc() = "Parallel Gauss-Seidel stencil sweeps";

  py::register_exception<sl::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<sl::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<sl::taskrt::StallError>(m, "StallError", PyExc_RuntimeError);

  py::class_<sl::Mesh>(m, "Mesh")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("n"))
      .def("init", &sl::Mesh::init, py::arg("seed"), py::arg("boundary") = 0.0)
      .def("fill", &sl::Mesh::fill)
      .def_property_readonly("dim", &sl::Mesh::dim)
      .def_property_readonly("n", &sl::Mesh::n)
      .def("values",
           [](const sl::Mesh& mesh) {
             auto v = mesh.values();
             return std::vector<double>(v.begin(), v.end());
           })
      .def("__getitem__",
           [](const sl::Mesh& mesh, std::vector<int> c) {
             if (static_cast<int>(c.size()) != mesh.dim()) throw py::index_error("coordinate rank");
             return mesh.at(c.size() == 2 ? sl::CellCoord(c[0], c[1]) : sl::CellCoord(c[0], c[1], c[2]));
           })
      .def("__setitem__",
           [](sl::Mesh& mesh, std::vector<int> c, double v) {
             if (static_cast<int>(c.size()) != mesh.dim()) throw py::index_error("coordinate rank");
             mesh.at(c.size() == 2 ? sl::CellCoord(c[0], c[1]) : sl::CellCoord(c[0], c[1], c[2])) = v;
           })
      .def("digest", [](const sl::Mesh& mesh) { return sl::format_digest(sl::digest(mesh)); })
      .def("__eq__", [](const sl::Mesh& a, const sl::Mesh& b) { return a == b; });

  m.def("residual", [](const sl::Mesh& mesh, const std::string& stencil) {
    return sl::residual_max(mesh, sl::Stencil(stencil_arg(stencil)));
  }, py::arg("mesh"), py::arg("stencil"));

  m.def(
      "sweep",
      [](sl::Mesh& mesh, const std::string& stencil, const std::string& strategy, unsigned threads,
         std::size_t sweeps, const std::string& schedule, std::size_t chunk,
         const std::string& cost) {
        const auto kind = stencil_arg(stencil);
        if (sl::stencil_dim(kind) != mesh.dim()) throw sl::ConfigError("stencil and mesh dimension differ");
        if (threads < 1) throw sl::ConfigError("threads must be at least 1");
        const sl::StrategyConfig cfg{strategy_arg(strategy), schedule_arg(schedule), chunk};
        py::gil_scoped_release release;
        std::unique_ptr<sl::taskrt::TaskRuntime> rt;
        if (cfg.id != sl::StrategyId::Serial) rt = std::make_unique<sl::taskrt::TaskRuntime>(threads);
        const sl::Sweeper sweeper(cfg, mesh.shape(), kind, threads);
        sl::SweepContext ctx(mesh, kind, cost_arg(cost), rt.get());
        for (std::size_t s = 0; s < sweeps; ++s) sweeper.sweep(ctx);
      },
      py::arg("mesh"), py::arg("stencil") = "fd5", py::arg("strategy") = "serial",
      py::arg("threads") = 1, py::arg("sweeps") = 1, py::arg("schedule") = "static",
      py::arg("chunk") = 1, py::arg("cost") = "const:0",
      "Run sweeps in place on a mesh.");

  m.def(
      "run",
      [](int dim, std::vector<int> sizes, const std::string& stencil, const std::string& cost,
         const std::string& strategy, std::vector<unsigned> threads, const std::string& schedule,
         std::size_t chunk, std::size_t sweeps, std::size_t reps, std::uint64_t seed,
         std::size_t warmup) {
        sl::BenchConfig c;
        c.dim = dim;
        c.sizes = std::move(sizes);
        c.kind = stencil_arg(stencil);
        c.cost = cost_arg(cost);
        c.strategy = strategy_arg(strategy);
        c.threads = std::move(threads);
        c.schedule = schedule_arg(schedule);
        c.chunk = chunk;
        c.sweeps = sweeps;
        c.reps = reps;
        c.seed = seed;
        c.warmup = warmup;
        std::vector<sl::BenchResult> results;
        {
          py::gil_scoped_release release;
          results = sl::run_benchmark(c);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d = point_dict(r.point);
          d["seconds"] = r.seconds;
          std::vector<std::string> digests;
          for (auto x : r.digests) digests.push_back(sl::format_digest(x));
          d["digests"] = digests;
          d["median_seconds"] = r.median_seconds();
          d["ns_per_cell_update"] = r.ns_per_cell_update(r.median_seconds());
          out.append(d);
        }
        return out;
      },
      py::arg("dim") = 2, py::arg("sizes") = std::vector<int>{16}, py::arg("stencil") = "fd5",
      py::arg("cost") = "const:0", py::arg("strategy") = "serial",
      py::arg("threads") = std::vector<unsigned>{1}, py::arg("schedule") = "static",
      py::arg("chunk") = 1, py::arg("sweeps") = 100, py::arg("reps") = 3, py::arg("seed") = 1,
      py::arg("warmup") = 3, "Benchmark; one dict per (size, threads) point.");

  m.def(
      "trace",
      [](const std::string& strategy, const std::string& stencil, int n, unsigned threads,
         std::size_t sweeps, std::uint64_t seed, const std::string& schedule, std::size_t chunk,
         const std::string& cost) {
        sl::TracedRunSpec spec;
        spec.strategy = {strategy_arg(strategy), schedule_arg(schedule), chunk};
        spec.kind = stencil_arg(stencil);
        spec.n = n;
        spec.threads = threads;
        spec.sweeps = sweeps;
        spec.seed = seed;
        spec.cost = cost_arg(cost);
        sl::TracedRun run = [&] {
          py::gil_scoped_release release;
          return sl::traced_run(spec);
        }();
        py::list records;
        for (const auto& r : run.records) records.append(py::make_tuple(r.task, r.worker, r.cell, r.start, r.end));
        py::list edges;
        for (const auto& e : run.edges) edges.append(py::make_tuple(e.from, e.to));
        const auto map = sl::build_assignment_map(run.records, run.mesh.shape(), sweeps - 1);
        py::dict d;
        d["records"] = records;
        d["edges"] = edges;
        d["problems"] = sl::trace_problems(spec, run);
        d["workers"] = map.worker;
        d["ppm"] = py::bytes(sl::render_assignment_map(map));
        d["digest"] = sl::format_digest(sl::digest(run.mesh));
        return d;
      },
      py::arg("strategy"), py::arg("stencil") = "fd5", py::arg("n") = 8, py::arg("threads") = 2,
      py::arg("sweeps") = 1, py::arg("seed") = 1, py::arg("schedule") = "static",
      py::arg("chunk") = 1, py::arg("cost") = "const:0",
      "Traced run: records (task, worker, cell, start, end), edges, problems, last-sweep map.");

  m.def(
      "verify",
      [](const std::string& suite, std::size_t reps, std::vector<unsigned> threads,
         std::vector<int> sizes) {
        sl::VerifyOptions o;
        o.reps = reps;
        o.threads = std::move(threads);
        o.sizes = std::move(sizes);
        std::vector<sl::SuiteReport> reports;
        {
          py::gil_scoped_release release;
          reports = sl::run_verification(suite, o);
        }
        py::dict out;
        for (const auto& r : reports) {
          py::list checks;
          for (const auto& c : r.checks) checks.append(py::make_tuple(c.name, c.pass, c.detail));
          out[py::str(r.suite)] = checks;
        }
        return out;
      },
      py::arg("suite") = "all", py::arg("reps") = 10, py::arg("threads") = std::vector<unsigned>{2, 4, 8},
      py::arg("sizes") = std::vector<int>{8, 16, 32},
      "Run verification suites; {suite: [(name, passed, detail)]}.");

  m.def(
      "sweeps_to_converge",
      [](const std::string& strategy, const std::string& stencil, int n, unsigned threads,
         double tol, std::size_t budget) {
        py::gil_scoped_release release;
        return sl::sweeps_to_converge({strategy_arg(strategy), {}, 1}, stencil_arg(stencil), n,
                                      threads, tol, budget);
      },
      py::arg("strategy"), py::arg("stencil"), py::arg("n"), py::arg("threads") = 1,
      py::arg("tol") = 1e-8, py::arg("budget") = 100000);

  m.def("colour_of", [](const std::string& stencil, std::vector<int> c) {
    return sl::colour_of(stencil_arg(stencil),
                         c.size() == 2 ? sl::CellCoord(c[0], c[1]) : sl::CellCoord(c[0], c[1], c[2]));
  });

  m.attr("STRATEGIES") = [] {
    std::vector<std::string> names;
    for (auto id : sl::kAllStrategies) names.emplace_back(sl::to_string(id));
    return names;
  }();
  m.attr("STENCILS") = std::vector<std::string>{"fd5", "fe9", "fd7", "fe27"};
}
