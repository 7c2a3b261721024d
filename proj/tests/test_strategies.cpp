#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <functional>
#include <memory>
#include <set>

#include "stencillab/bench.hpp"
#include "stencillab/strategies.hpp"

using namespace stencillab;
using taskrt::Schedule;
using taskrt::TaskRuntime;

namespace {

constexpr StencilKind kKinds[] = {StencilKind::FD5, StencilKind::FE9, StencilKind::FD7,
                                  StencilKind::FE27};

std::vector<CellCoord> all_cells(int dim, int p) {
  std::vector<CellCoord> out;
  for (int z = 0; z < (dim == 3 ? p : 1); ++z)
    for (int y = 0; y < p; ++y)
      for (int x = 0; x < p; ++x) out.push_back(dim == 3 ? CellCoord(x, y, z) : CellCoord(x, y));
  return out;
}

// Reference orders built from the definitions: lexicographic, and the
// same list stably grouped by colour.
void lex_sweep(Mesh& m, StencilKind kind) {
  const Stencil s(kind);
  for (const CellCoord& c : interior_cells(m.shape())) update_cell(m, s, c, 0);
}

void colour_sweep(Mesh& m, StencilKind kind) {
  auto cells = interior_cells(m.shape());
  std::stable_sort(cells.begin(), cells.end(), [kind](const CellCoord& a, const CellCoord& b) {
    return colour_of(kind, a) < colour_of(kind, b);
  });
  const Stencil s(kind);
  for (const CellCoord& c : cells) update_cell(m, s, c, 0);
}

// Nested dissection written out directly: split at lo + extent/2 while
// levels remain and every extent exceeds 2; children in octant order,
// then the separator lexicographically.
void nd_sweep(Mesh& m, const Stencil& s, std::array<int, 3> lo, std::array<int, 3> hi,
              int levels_left) {
  const int dim = m.dim();
  bool split = levels_left > 0;
  for (int a = 0; a < dim; ++a) split = split && hi[a] - lo[a] + 1 > 2;
  auto visit_box = [&](auto pred) {
    for (int z = (dim == 3 ? lo[2] : 0); z <= (dim == 3 ? hi[2] : 0); ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x) {
          const CellCoord c = dim == 3 ? CellCoord(x, y, z) : CellCoord(x, y);
          if (pred(c)) update_cell(m, s, c, 0);
        }
  };
  if (!split) {
    if (lo[0] <= hi[0] && lo[1] <= hi[1] && (dim == 2 || lo[2] <= hi[2]))
      visit_box([](const CellCoord&) { return true; });
    return;
  }
  std::array<int, 3> mid{};
  for (int a = 0; a < dim; ++a) mid[a] = lo[a] + (hi[a] - lo[a] + 1) / 2;
  for (int o = 0; o < (1 << dim); ++o) {
    std::array<int, 3> clo = lo, chi = hi;
    for (int a = 0; a < dim; ++a) {
      if ((o >> a) & 1) clo[a] = mid[a] + 1;
      else chi[a] = mid[a] - 1;
    }
    nd_sweep(m, s, clo, chi, levels_left - 1);
  }
  visit_box([&](const CellCoord& c) {
    for (int a = 0; a < dim; ++a)
      if (c[a] == mid[a]) return true;
    return false;
  });
}

Mesh seeded(StencilKind kind, int n, std::uint64_t seed = 11) {
  Mesh m(stencil_dim(kind), n);
  m.init(seed, 0.5);
  return m;
}

Mesh run(StrategyConfig cfg, StencilKind kind, int n, unsigned threads, int sweeps,
         CostModel cost = CostModel::constant(0)) {
  Mesh m = seeded(kind, n);
  std::unique_ptr<TaskRuntime> rt;
  if (cfg.id != StrategyId::Serial) rt = std::make_unique<TaskRuntime>(threads);
  const Sweeper sw(cfg, m.shape(), kind, threads);
  SweepContext ctx(m, kind, cost, rt.get());
  for (int s = 0; s < sweeps; ++s) sw.sweep(ctx);
  return m;
}

}  // namespace

TEST_CASE("strategy names round-trip", "[strategies]") {
  for (StrategyId id : kAllStrategies) CHECK(parse_strategy(to_string(id)) == id);
  CHECK(to_string(StrategyId::NestedDissection) == "nd");
  CHECK_FALSE(parse_strategy("wavefront").has_value());
}

TEST_CASE("colour ids", "[strategies]") {
  CHECK(colour_of(StencilKind::FD5, CellCoord(1, 1)) == 0);
  CHECK(colour_of(StencilKind::FD5, CellCoord(2, 1)) == 1);
  CHECK(colour_of(StencilKind::FE9, CellCoord(1, 1)) == 0);
  CHECK(colour_of(StencilKind::FE9, CellCoord(2, 1)) == 1);
  CHECK(colour_of(StencilKind::FE9, CellCoord(1, 2)) == 2);
  CHECK(colour_of(StencilKind::FE9, CellCoord(2, 2)) == 3);
  CHECK(colour_of(StencilKind::FD7, CellCoord(1, 1, 1)) == 0);
  CHECK(colour_of(StencilKind::FD7, CellCoord(2, 1, 1)) == 1);
  CHECK(colour_of(StencilKind::FE27, CellCoord(1, 1, 1)) == 0);
  CHECK(colour_of(StencilKind::FE27, CellCoord(2, 2, 2)) == 7);
  CHECK(colour_of(StencilKind::FE27, CellCoord(1, 1, 2)) == 4);
}

TEST_CASE("colour counts", "[strategies]") {
  CHECK(colour_count(StencilKind::FD5) == 2);
  CHECK(colour_count(StencilKind::FD7) == 2);
  CHECK(colour_count(StencilKind::FE9) == 4);
  CHECK(colour_count(StencilKind::FE27) == 8);
}

TEST_CASE("no two adjacent cells share a colour", "[strategies]") {
  for (StencilKind kind : kKinds) {
    const int dim = stencil_dim(kind);
    const Stencil s(kind);
    const auto cells = all_cells(dim, 8);
    for (const CellCoord& a : cells)
      for (const CellCoord& b : cells)
        if (s.adjacent(a, b)) REQUIRE(colour_of(kind, a) != colour_of(kind, b));
  }
}

TEST_CASE("colour classes partition the interior in loop order", "[strategies]") {
  for (StencilKind kind : kKinds) {
    for (int n : {1, 2, 5, 6}) {
      const MeshShape shape{stencil_dim(kind), n};
      std::vector<std::size_t> joined;
      for (int p = 0; p < colour_count(kind); ++p) {
        const auto cells = colour_cells(shape, kind, p);
        REQUIRE(std::is_sorted(cells.begin(), cells.end()));
        for (std::size_t f : cells) REQUIRE(colour_of(kind, shape.coord(f)) == p);
        joined.insert(joined.end(), cells.begin(), cells.end());
      }
      REQUIRE(joined == colour_major_order(shape, kind));
      std::sort(joined.begin(), joined.end());
      REQUIRE(joined == lexicographic_order(shape));
    }
  }
}

TEST_CASE("FD5 on 5x5 splits 13/12", "[strategies]") {
  const MeshShape shape{2, 5};
  CHECK(colour_cells(shape, StencilKind::FD5, 0).size() == 13);
  CHECK(colour_cells(shape, StencilKind::FD5, 1).size() == 12);
  CHECK(colour_cells(shape, StencilKind::FE9, 0).size() == 9);
  CHECK(colour_cells(shape, StencilKind::FE9, 3).size() == 4);
}

TEST_CASE("dissection levels and shapes", "[strategies]") {
  CHECK(dissection_levels(1, 2) == 1);
  CHECK(dissection_levels(4, 2) == 2);
  CHECK(dissection_levels(5, 2) == 3);
  CHECK(dissection_levels(8, 3) == 2);
  CHECK(dissection_levels(9, 3) == 3);

  const MeshShape s5{2, 5};
  const auto root = dissect(Box::whole(s5), 1, 2);
  CHECK(root.separator().size() == 9);
  CHECK(root.leaf_count() == 4);
  CHECK(root.mid[0] == 3);
  CHECK(root.mid[1] == 3);

  const auto deep = dissect(Box::whole(MeshShape{2, 40}), 5, 2);
  CHECK(deep.leaf_count() == 64);
  CHECK(deep.height() == 3);

  // Extents of 2 or less stop the split.
  CHECK(dissect(Box::whole(MeshShape{2, 2}), 8, 2).leaf());
}

TEST_CASE("dissection partitions the interior", "[strategies]") {
  for (int dim : {2, 3}) {
    for (int n = 1; n <= 9; ++n) {
      for (unsigned t : {1U, 2U, 4U, 9U}) {
        const MeshShape shape{dim, n};
        std::multiset<std::size_t> seen;
        std::function<void(const DissectionNode&)> walk = [&](const DissectionNode& node) {
          for (const CellCoord& c : node.own_cells()) {
            REQUIRE(node.region.contains(c));
            seen.insert(shape.index(c));
          }
          for (const auto& child : node.children) {
            for (int a = 0; a < dim; ++a) {
              REQUIRE(child.region.lo[a] >= node.region.lo[a]);
              REQUIRE(child.region.hi[a] <= node.region.hi[a]);
            }
            walk(child);
          }
        };
        walk(dissect(Box::whole(shape), t, dim));
        const auto lex = lexicographic_order(shape);
        REQUIRE(std::vector<std::size_t>(seen.begin(), seen.end()) == lex);
      }
    }
  }
}

TEST_CASE("separators decouple sibling blocks", "[strategies]") {
  for (StencilKind kind : kKinds) {
    const int dim = stencil_dim(kind);
    const MeshShape shape{dim, 9};
    const Stencil s(kind);
    const auto root = dissect(Box::whole(shape), 1, dim);
    for (std::size_t i = 0; i < root.children.size(); ++i)
      for (std::size_t j = i + 1; j < root.children.size(); ++j)
        for (const CellCoord& a : root.children[i].own_cells())
          for (const CellCoord& b : root.children[j].own_cells()) REQUIRE_FALSE(s.adjacent(a, b));
  }
}

TEST_CASE("ND at one thread matches the direct recursive order", "[strategies]") {
  for (StencilKind kind : kKinds) {
    for (int n : {4, 7, 12}) {
      Mesh expect = seeded(kind, n);
      const int dim = stencil_dim(kind);
      for (int s = 0; s < 2; ++s)
        nd_sweep(expect, Stencil(kind), {1, 1, 1}, {n, n, n}, dissection_levels(1, dim));

      Mesh serial = seeded(kind, n);
      SweepContext ctx(serial, kind, CostModel::constant(0));
      const auto tree = dissect(Box::whole(serial.shape()), 1, dim);
      for (int s = 0; s < 2; ++s) sweep_nested_dissection(ctx, tree);
      CHECK(serial == expect);

      CHECK(run({StrategyId::NestedDissection, {}, 1}, kind, n, 1, 2) == expect);
    }
  }
}

TEST_CASE("ND results do not depend on the thread count", "[strategies]") {
  for (StencilKind kind : kKinds) {
    const int n = stencil_dim(kind) == 2 ? 30 : 12;
    for (unsigned t : {2U, 3U, 4U, 8U}) {
      Mesh expect = seeded(kind, n);
      for (int s = 0; s < 3; ++s)
        nd_sweep(expect, Stencil(kind), {1, 1, 1}, {n, n, n},
                 dissection_levels(t, stencil_dim(kind)));
      const Mesh a = run({StrategyId::NestedDissection, {}, 1}, kind, n, t, 3);
      const Mesh b = run({StrategyId::NestedDissection, {}, 1}, kind, n, t, 3);
      CHECK(a == expect);
      CHECK(a == b);
    }
  }
}

TEST_CASE("serial and taskgraph follow lexicographic order", "[strategies]") {
  for (StencilKind kind : kKinds) {
    const int n = stencil_dim(kind) == 2 ? 11 : 6;
    Mesh expect = seeded(kind, n);
    for (int s = 0; s < 3; ++s) lex_sweep(expect, kind);
    CHECK(run({StrategyId::Serial, {}, 1}, kind, n, 1, 3) == expect);
    for (unsigned t : {1U, 2U, 4U})
      for (std::size_t chunk : {1U, 4U})
        CHECK(run({StrategyId::Taskgraph, {}, chunk}, kind, n, t, 3) == expect);
  }
}

TEST_CASE("colour strategies follow colour-major order", "[strategies]") {
  for (StencilKind kind : kKinds) {
    const int n = stencil_dim(kind) == 2 ? 11 : 6;
    Mesh expect = seeded(kind, n);
    for (int s = 0; s < 3; ++s) colour_sweep(expect, kind);
    for (unsigned t : {1U, 2U, 3U, 4U}) {
      for (Schedule sch : {Schedule::static_split(), Schedule::dynamic(1), Schedule::dynamic(3)}) {
        CHECK(run({StrategyId::Colouring, sch, 1}, kind, n, t, 3) == expect);
        CHECK(run({StrategyId::HybSync, sch, 1}, kind, n, t, 3) == expect);
      }
      for (std::size_t chunk : {1U, 3U})
        CHECK(run({StrategyId::HybDepend, {}, chunk}, kind, n, t, 3) == expect);
    }
  }
}

TEST_CASE("colouring without a runtime runs serially", "[strategies]") {
  Mesh expect = seeded(StencilKind::FE9, 6);
  colour_sweep(expect, StencilKind::FE9);
  Mesh m = seeded(StencilKind::FE9, 6);
  SweepContext ctx(m, StencilKind::FE9, CostModel::constant(0));
  sweep_colouring(ctx, Schedule::static_split());
  CHECK(m == expect);
}

TEST_CASE("all strategies converge within twice the serial sweeps", "[strategies]") {
  for (StencilKind kind : {StencilKind::FD5, StencilKind::FE27}) {
    const int n = stencil_dim(kind) == 2 ? 9 : 5;
    const auto serial = sweeps_to_converge({StrategyId::Serial, {}, 1}, kind, n, 1, 1e-10, 10'000);
    REQUIRE(serial.has_value());
    for (StrategyId id : kAllStrategies) {
      const auto count = sweeps_to_converge({id, {}, 1}, kind, n, 3, 1e-10, 2 * *serial);
      CHECK(count.has_value());
    }
  }
}

TEST_CASE("ramp cost leaves the result unchanged", "[strategies]") {
  const Mesh a = run({StrategyId::HybDepend, {}, 2}, StencilKind::FD5, 8, 2, 2);
  const Mesh b = run({StrategyId::HybDepend, {}, 2}, StencilKind::FD5, 8, 2, 2, CostModel::ramp());
  CHECK(a == b);
}
