#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "stencillab/bench.hpp"
#include "stencillab/trace.hpp"

using namespace stencillab;

namespace {

TraceRecord rec(taskrt::TaskId task, unsigned worker, std::size_t cell, std::int64_t start,
                std::int64_t end) {
  return {task, worker, cell, start, end};
}

}  // namespace

TEST_CASE("overlapping adjacent updates are flagged", "[trace]") {
  const MeshShape shape{2, 4};
  const Stencil fd5(StencilKind::FD5);
  const std::size_t a = shape.index(CellCoord(2, 2));
  const std::size_t east = shape.index(CellCoord(3, 2));
  const std::size_t diag = shape.index(CellCoord(3, 3));
  const std::size_t far = shape.index(CellCoord(4, 4));

  std::vector<TraceRecord> t{rec(1, 0, a, 0, 10), rec(2, 1, east, 5, 15)};
  const auto v = check_adjacency_exclusion(t, fd5, shape);
  REQUIRE(v.size() == 1);
  CHECK(((v[0].first.cell == a && v[0].second.cell == east) ||
         (v[0].first.cell == east && v[0].second.cell == a)));

  // Half-open intervals: touching is not overlapping.
  t = {rec(1, 0, a, 0, 10), rec(2, 1, east, 10, 15)};
  CHECK(check_adjacency_exclusion(t, fd5, shape).empty());

  // Diagonal neighbours conflict only under the full stencil.
  t = {rec(1, 0, a, 0, 10), rec(2, 1, diag, 1, 2), rec(3, 1, far, 2, 9)};
  CHECK(check_adjacency_exclusion(t, fd5, shape).empty());
  CHECK(check_adjacency_exclusion(t, Stencil(StencilKind::FE9), shape).size() == 1);

  // Same worker: sequential by construction, never reported.
  t = {rec(1, 0, a, 0, 10), rec(2, 0, east, 5, 15)};
  CHECK(check_adjacency_exclusion(t, fd5, shape).empty());

  // Same cell twice at once.
  t = {rec(1, 0, a, 0, 10), rec(2, 1, a, 9, 12)};
  CHECK(check_adjacency_exclusion(t, fd5, shape).size() == 1);
}

TEST_CASE("exclusion check agrees with a pairwise scan", "[trace]") {
  const MeshShape shape{2, 5};
  const Stencil s(StencilKind::FE9);
  std::mt19937_64 rng(4);
  const auto cells = lexicographic_order(shape);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TraceRecord> t;
    for (int i = 0; i < 40; ++i) {
      const std::int64_t start = static_cast<std::int64_t>(rng() % 100);
      t.push_back(rec(0, static_cast<unsigned>(rng() % 3), cells[rng() % cells.size()], start,
                      start + static_cast<std::int64_t>(rng() % 10)));
    }
    std::sort(t.begin(), t.end(), [](const auto& x, const auto& y) { return x.start < y.start; });
    std::size_t want = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = i + 1; j < t.size(); ++j) {
        const auto end_i = std::max(t[i].end, t[i].start + 1);
        const auto end_j = std::max(t[j].end, t[j].start + 1);
        const bool overlap = t[i].start < end_j && t[j].start < end_i;
        const bool near = t[i].cell == t[j].cell ||
                          s.adjacent(shape.coord(t[i].cell), shape.coord(t[j].cell));
        if (overlap && near && t[i].worker != t[j].worker) ++want;
      }
    REQUIRE(check_adjacency_exclusion(t, s, shape).size() == want);
  }
}

TEST_CASE("edge order violations are reported", "[trace]") {
  const std::vector<TraceRecord> t{rec(1, 0, 6, 0, 10), rec(2, 1, 7, 5, 12),
                                   rec(3, 0, 8, 12, 14)};
  const std::vector<taskrt::DependenceEdge> edges{{1, 2}, {2, 3}, {1, 3}, {9, 3}};
  const auto late = check_edge_order(t, edges);
  REQUIRE(late.size() == 1);
  CHECK(late[0] == taskrt::DependenceEdge{1, 2});
}

TEST_CASE("write counts", "[trace]") {
  const MeshShape shape{2, 2};
  std::vector<TraceRecord> t;
  for (std::size_t f : lexicographic_order(shape)) t.push_back(rec(0, 0, f, 0, 1));
  CHECK(check_write_counts(t, shape, 1).empty());
  t.pop_back();
  CHECK(check_write_counts(t, shape, 1) == std::vector<std::size_t>{shape.index(CellCoord(2, 2))});
}

TEST_CASE("trace buffers drop and flag overflow", "[trace]") {
  ExecutionTrace tr(2, 2);
  for (int i = 0; i < 3; ++i) tr.record(rec(0, 1, 5, i, i + 1));
  CHECK(tr.overflow());
  CHECK_THROWS(tr.merged());
  tr.clear();
  CHECK_FALSE(tr.overflow());
  tr.record(rec(0, 1, 5, 3, 4));
  tr.record(rec(0, 0, 6, 3, 4));
  tr.record(rec(0, 0, 7, 1, 2));
  const auto m = tr.merged();
  REQUIRE(m.size() == 3);
  CHECK(m[0].cell == 7);
  CHECK(m[1].worker == 0);
  CHECK(m[2].worker == 1);
}

TEST_CASE("assignment map picks the requested sweep", "[trace]") {
  const MeshShape shape{2, 2};
  std::vector<TraceRecord> t;
  const auto cells = lexicographic_order(shape);
  for (std::size_t i = 0; i < cells.size(); ++i) t.push_back(rec(0, 0, cells[i], 0, 1));
  for (std::size_t i = 0; i < cells.size(); ++i)
    t.push_back(rec(0, static_cast<unsigned>(i), cells[i], 2, 3));
  CHECK(build_assignment_map(t, shape, 0).worker == std::vector<int>{0, 0, 0, 0});
  CHECK(build_assignment_map(t, shape, 1).worker == std::vector<int>{0, 1, 2, 3});

  t.pop_back();
  try {
    build_assignment_map(t, shape, 1);
    FAIL("expected IncompleteTraceError");
  } catch (const IncompleteTraceError& e) {
    CHECK(e.missing() == std::vector<std::size_t>{cells.back()});
  }
}

TEST_CASE("assignment map image", "[trace]") {
  AssignmentMap map{MeshShape{2, 2}, {0, 1, 17, 3}};
  const std::string img = render_assignment_map(map);

  // Expected bytes assembled by hand: white halo, palette colours inside.
  const auto pal = worker_palette();
  REQUIRE(pal.size() == 16);
  CHECK(pal[0].r == 0xe6);
  CHECK(pal[0].g == 0x19);
  CHECK(pal[0].b == 0x4b);
  std::istringstream in(img);
  std::string magic, comment;
  int w = 0, h = 0, maxv = 0;
  std::getline(in, magic);
  std::getline(in, comment);
  in >> w >> h >> maxv;
  in.get();
  CHECK(magic == "P6");
  CHECK(comment.rfind("# palette", 0) == 0);
  CHECK(comment.find("0=e6194b") != std::string::npos);
  REQUIRE(w == 4);
  REQUIRE(h == 4);
  REQUIRE(maxv == 255);
  std::string pixels((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(pixels.size() == 48);
  auto px = [&](int x, int y) {
    const std::size_t o = static_cast<std::size_t>((y * 4 + x) * 3);
    return std::array<unsigned char, 3>{static_cast<unsigned char>(pixels[o]),
                                        static_cast<unsigned char>(pixels[o + 1]),
                                        static_cast<unsigned char>(pixels[o + 2])};
  };
  using Px = std::array<unsigned char, 3>;
  for (int i = 0; i < 4; ++i) {
    CHECK(px(i, 0) == Px{255, 255, 255});
    CHECK(px(0, i) == Px{255, 255, 255});
    CHECK(px(3, i) == Px{255, 255, 255});
  }
  CHECK(px(1, 1) == Px{pal[0].r, pal[0].g, pal[0].b});
  CHECK(px(2, 1) == Px{pal[1].r, pal[1].g, pal[1].b});
  CHECK(px(1, 2) == Px{pal[1].r, pal[1].g, pal[1].b});  // 17 mod 16
  CHECK(px(2, 2) == Px{pal[3].r, pal[3].g, pal[3].b});
}

TEST_CASE("3D maps render one slice", "[trace]") {
  AssignmentMap map{MeshShape{3, 3}, std::vector<int>(27, 0)};
  for (int i = 9; i < 18; ++i) map.worker[static_cast<std::size_t>(i)] = 2;
  const std::string mid = render_assignment_map(map);
  const std::string top = render_assignment_map(map, 3);
  CHECK(mid != top);
  CHECK(mid.size() == top.size());
  CHECK_THROWS_AS(render_assignment_map(map, 0), std::out_of_range);
}

TEST_CASE("band contiguity", "[trace]") {
  const MeshShape shape{2, 4};
  std::vector<int> colour(16);
  for (int r = 0; r < 16; ++r) colour[static_cast<std::size_t>(r)] = ((r / 4) + (r % 4)) % 2;
  AssignmentMap good{shape, {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1}};
  CHECK(band_contiguity(good, colour));
  AssignmentMap bad{shape, {0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1}};
  CHECK_FALSE(band_contiguity(bad, colour));
}

TEST_CASE("trace dump round-trips", "[trace]") {
  TracedRunSpec spec;
  spec.strategy = {StrategyId::HybDepend, {}, 1};
  spec.n = 6;
  spec.threads = 3;
  spec.sweeps = 2;
  const TracedRun run = traced_run(spec);
  std::stringstream s;
  write_trace_dump(s, run.records);
  CHECK(read_trace_dump(s) == run.records);

  std::istringstream bad("1 2 3 4\n");
  CHECK_THROWS(read_trace_dump(bad));
}

TEST_CASE("traced runs are clean for every strategy", "[trace]") {
  for (StrategyId id : kAllStrategies) {
    for (StencilKind kind : {StencilKind::FE9, StencilKind::FD7}) {
      TracedRunSpec spec;
      spec.strategy = {id, taskrt::Schedule::dynamic(2), 2};
      spec.kind = kind;
      spec.n = 7;
      spec.threads = 3;
      spec.sweeps = 3;
      const TracedRun run = traced_run(spec);
      INFO(to_string(id) << ' ' << to_string(kind));
      CHECK(trace_problems(spec, run).empty());
      if (id == StrategyId::Taskgraph || id == StrategyId::HybDepend) {
        CHECK(std::all_of(run.records.begin(), run.records.end(),
                          [](const TraceRecord& r) { return r.task != taskrt::kNoTask; }));
      }
    }
  }
}
