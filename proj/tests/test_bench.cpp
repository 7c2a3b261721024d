#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "stencillab/bench.hpp"

using namespace stencillab;
using taskrt::Schedule;

TEST_CASE("config validation", "[bench]") {
  BenchConfig c;
  CHECK_NOTHROW(c.validate());
  c.dim = 3;
  c.kind = StencilKind::FE9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.kind = StencilKind::FE27;
  CHECK_NOTHROW(c.validate());
  c.dim = 4;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  BenchConfig z;
  z.sizes = {8, 0};
  CHECK_THROWS_AS(z.validate(), ConfigError);
  z.sizes = {8};
  z.threads = {0};
  CHECK_THROWS_AS(z.validate(), ConfigError);
  z.threads = {2};
  z.reps = 0;
  CHECK_THROWS_AS(z.validate(), ConfigError);
  CHECK_THROWS_AS(run_benchmark(z), ConfigError);
}

TEST_CASE("cell update counts", "[bench]") {
  BenchPoint p;
  p.dim = 3;
  p.n = 10;
  p.sweeps = 7;
  CHECK(p.cell_updates() == 7000);
}

namespace {

BenchResult random_result(std::mt19937_64& rng) {
  constexpr StencilKind kinds[] = {StencilKind::FD5, StencilKind::FE9, StencilKind::FD7,
                                   StencilKind::FE27};
  BenchResult r;
  r.point.kind = kinds[rng() % 4];
  r.point.dim = stencil_dim(r.point.kind);
  r.point.n = static_cast<int>(1 + rng() % 500);
  r.point.cost = rng() % 2 ? CostModel::ramp() : CostModel::constant(static_cast<int>(rng() % 100));
  r.point.strategy = kAllStrategies[rng() % kAllStrategies.size()];
  r.point.threads = static_cast<unsigned>(1 + rng() % 64);
  r.point.schedule = rng() % 2 ? Schedule::static_split() : Schedule::dynamic(1 + rng() % 9);
  r.point.chunk = 1 + rng() % 16;
  r.point.sweeps = 1 + rng() % 1000;
  std::uniform_real_distribution<double> secs(1e-9, 100.0);
  for (std::size_t i = 0, reps = 1 + rng() % 6; i < reps; ++i) {
    r.seconds.push_back(secs(rng));
    r.digests.push_back(rng());
  }
  return r;
}

}  // namespace

TEST_CASE("CSV round-trips exactly", "[bench]") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BenchResult> results;
    for (std::size_t i = 0, k = 1 + rng() % 5; i < k; ++i) results.push_back(random_result(rng));
    std::stringstream s;
    write_csv_header(s);
    for (const auto& r : results) write_csv_rows(s, r);
    REQUIRE(read_csv(s) == results);
  }
}

TEST_CASE("CSV layout", "[bench]") {
  BenchResult r;
  r.point.n = 4;
  r.point.sweeps = 2;
  r.seconds = {0.5, 0.25, 1.0};
  r.digests = {1, 2, 255};
  std::ostringstream s;
  write_csv_header(s);
  write_csv_rows(s, r);
  std::istringstream lines(s.str());
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  REQUIRE(all.size() == 7);
  CHECK(all[0] == kCsvHeader);
  CHECK(all[1] == "2,4,fd5,const:0,serial,1,static,1,2,0,0.5,15625000,0000000000000001");
  CHECK(all[4] == "2,4,fd5,const:0,serial,1,static,1,2,min,0.25,7812500,00000000000000ff");
  CHECK(all[5] == "2,4,fd5,const:0,serial,1,static,1,2,median,0.5,15625000,00000000000000ff");
  CHECK(all[6] == "2,4,fd5,const:0,serial,1,static,1,2,max,1,31250000,00000000000000ff");
}

TEST_CASE("malformed CSV is rejected", "[bench]") {
  const std::string row = "2,4,fd5,const:0,serial,1,static,1,2,0,0.5,1,0000000000000001\n";
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
  };
  CHECK(parse(row).size() == 1);
  CHECK_THROWS(parse("2,4,fd5\n"));
  CHECK_THROWS(parse("2,4,fd6,const:0,serial,1,static,1,2,0,0.5,1,0000000000000001\n"));
  CHECK_THROWS(parse("2,4,fd5,const:0,serial,1,static,1,2,1,0.5,1,0000000000000001\n"));
  CHECK_THROWS(parse(row + "2,4,fd5,const:0,serial,1,static,1,2,median,0.7,1,0000000000000001\n"));
  CHECK_THROWS(parse("2,4,fd5,const:0,serial,1,static,1,2,0,abc,1,0000000000000001\n"));
}

TEST_CASE("benchmarks are reproducible", "[bench]") {
  BenchConfig c;
  c.sizes = {6, 9};
  c.sweeps = 4;
  c.reps = 3;
  c.warmup = 1;
  c.seed = 5;
  const auto serial = run_benchmark(c);
  REQUIRE(serial.size() == 2);
  for (const auto& r : serial) {
    REQUIRE(r.seconds.size() == 3);
    CHECK(r.digests[0] == r.digests[1]);
    CHECK(r.digests[1] == r.digests[2]);
  }

  c.strategy = StrategyId::Taskgraph;
  c.threads = {1, 3};
  std::size_t points = 0;
  const auto tasks = run_benchmark(c, [&](const BenchResult&) { ++points; });
  CHECK(points == 4);
  for (const auto& r : tasks) {
    const auto& ref = r.point.n == 6 ? serial[0] : serial[1];
    CHECK(r.digests == ref.digests);
  }
}

TEST_CASE("repetition timings are stable", "[bench]") {
  BenchConfig c;
  c.sizes = {16};
  c.sweeps = 1000;
  c.reps = 5;
  const auto r = run_benchmark(c).front();
  CHECK(r.point.cell_updates() == 256'000);
  CHECK(r.max_seconds() < 3 * r.min_seconds());

  c.strategy = StrategyId::Colouring;
  c.reps = 1;
  const auto col = run_benchmark(c).front();
  CHECK(col.point.cell_updates() == r.point.cell_updates());
}

TEST_CASE("digest format", "[bench]") {
  CHECK(format_digest(0) == "0000000000000000");
  CHECK(format_digest(0xdeadbeefULL) == "00000000deadbeef");
}
