#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stencillab/strategies.hpp"
#include "stencillab/taskrt/dependency.hpp"

using namespace stencillab;
using namespace stencillab::taskrt;

namespace {

std::vector<DependenceEdge> E(std::initializer_list<std::pair<TaskId, TaskId>> list) {
  std::vector<DependenceEdge> out;
  for (auto [a, b] : list) out.push_back({a, b});
  return out;
}

}  // namespace

TEST_CASE("writers form a chain", "[dependency]") {
  std::vector<TaskRecord> tasks;
  for (TaskId id = 1; id <= 4; ++id) tasks.push_back({id, {}, {7}});
  CHECK(tracker_edges(tasks) == E({{1, 2}, {2, 3}, {3, 4}}));
  CHECK(oracle_edges(tasks) == tracker_edges(tasks));
}

TEST_CASE("readers share a writer and block the next one", "[dependency]") {
  const std::vector<TaskRecord> tasks{{1, {}, {0}}, {2, {0}, {}}, {3, {0}, {1}}, {4, {}, {0}}};
  CHECK(tracker_edges(tasks) == E({{1, 2}, {1, 3}, {1, 4}, {2, 4}, {3, 4}}));
  CHECK(oracle_edges(tasks) == tracker_edges(tasks));
}

TEST_CASE("reading and writing the same location counts once", "[dependency]") {
  const std::vector<TaskRecord> tasks{{1, {0}, {0}}, {2, {0}, {0}}, {3, {0}, {}}};
  CHECK(tracker_edges(tasks) == E({{1, 2}, {2, 3}}));
  CHECK(oracle_edges(tasks) == tracker_edges(tasks));
}

TEST_CASE("tracker agrees with the pairwise oracle on random submissions", "[dependency]") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t locations = 1 + rng() % 8;
    const std::size_t count = 1 + rng() % 40;
    std::vector<TaskRecord> tasks;
    for (std::size_t t = 0; t < count; ++t) {
      TaskRecord r{t + 1, {}, {}};
      for (std::size_t i = rng() % 4; i > 0; --i) r.in.push_back(rng() % locations);
      for (std::size_t i = rng() % 3; i > 0; --i) r.out.push_back(rng() % locations);
      tasks.push_back(std::move(r));
    }
    const auto got = tracker_edges(tasks);
    const auto want = oracle_edges(tasks);
    REQUIRE(got == want);
    for (const auto& e : got) REQUIRE(e.from < e.to);
  }
}

TEST_CASE("task ids must increase", "[dependency]") {
  DependencyTracker t;
  std::vector<TaskId> preds;
  const Location loc[] = {0};
  t.submit(5, loc, loc, preds);
  CHECK_THROWS_AS(t.submit(5, loc, loc, preds), std::invalid_argument);
  CHECK_THROWS_AS(t.submit(3, loc, loc, preds), std::invalid_argument);
  t.reset();
  t.submit(1, loc, loc, preds);
  CHECK(preds.empty());
}

TEST_CASE("lexicographic FD5 tasks form a wavefront", "[dependency]") {
  const MeshShape shape{2, 3};
  const auto edges = tracker_edges(taskgraph_plan(shape, StencilKind::FD5).records());
  // Tasks 1..9 row-major; predecessors are west and north only.
  CHECK(edges == E({{1, 2}, {1, 4}, {2, 3}, {2, 5}, {3, 6}, {4, 5}, {4, 7},
                    {5, 6}, {5, 8}, {6, 9}, {7, 8}, {8, 9}}));
}

TEST_CASE("colour-major FD5 tasks: second colour waits on the first", "[dependency]") {
  for (int n : {3, 4, 7}) {
    const MeshShape shape{2, n};
    const auto plan = hyb_depend_plan(shape, StencilKind::FD5);
    const auto edges = tracker_edges(plan.records());
    const TaskId first = colour_cells(shape, StencilKind::FD5, 0).size();
    for (const auto& e : edges) {
      CHECK(e.from <= first);
      CHECK(e.to > first);
    }
    for (TaskId t = first + 1; t <= plan.tasks(); ++t) {
      CHECK(std::any_of(edges.begin(), edges.end(), [&](const auto& e) { return e.to == t; }));
    }
  }
}

TEST_CASE("chunked plans keep one writer per cell", "[dependency]") {
  for (std::size_t chunk : {1U, 2U, 5U}) {
    const MeshShape shape{3, 3};
    const auto plan = taskgraph_plan(shape, StencilKind::FE27, chunk);
    CHECK(plan.cells.size() == shape.interior_count());
    CHECK(plan.tasks() == (shape.interior_count() + chunk - 1) / chunk);
    const auto records = plan.records();
    CHECK(tracker_edges(records) == oracle_edges(records));
  }
}
