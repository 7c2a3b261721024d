#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "stencillab/bench.hpp"

namespace stencillab {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ls(line);
  while (std::getline(ls, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <class T>
T parse_number(const std::string& text, std::size_t lineno) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("line " + std::to_string(lineno) + ": bad number '" + text + "'");
  }
  return value;
}

std::uint64_t parse_digest(const std::string& text, std::size_t lineno) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("line " + std::to_string(lineno) + ": bad digest '" + text + "'");
  }
  return value;
}

void write_point(std::ostream& out, const BenchPoint& p) {
  out << p.dim << ',' << p.n << ',' << to_string(p.kind) << ',' << p.cost.to_string() << ','
      << to_string(p.strategy) << ',' << p.threads << ',' << p.schedule.to_string() << ','
      << p.chunk << ',' << p.sweeps;
}

BenchPoint read_point(const std::vector<std::string>& f, std::size_t lineno) {
  auto fail = [&](const std::string& what) {
    return std::runtime_error("line " + std::to_string(lineno) + ": " + what);
  };
  BenchPoint p;
  p.dim = parse_number<int>(f[0], lineno);
  p.n = parse_number<int>(f[1], lineno);
  auto kind = parse_stencil(f[2]);
  if (!kind) throw fail("unknown stencil '" + f[2] + "'");
  p.kind = *kind;
  auto cost = CostModel::parse(f[3]);
  if (!cost) throw fail("unknown cost '" + f[3] + "'");
  p.cost = *cost;
  auto strategy = parse_strategy(f[4]);
  if (!strategy) throw fail("unknown strategy '" + f[4] + "'");
  p.strategy = *strategy;
  p.threads = parse_number<unsigned>(f[5], lineno);
  auto schedule = taskrt::Schedule::parse(f[6]);
  if (!schedule) throw fail("unknown schedule '" + f[6] + "'");
  p.schedule = *schedule;
  p.chunk = parse_number<std::size_t>(f[7], lineno);
  p.sweeps = parse_number<std::size_t>(f[8], lineno);
  return p;
}

}  // namespace

std::string format_digest(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_rows(std::ostream& out, const BenchResult& r) {
  for (std::size_t i = 0; i < r.seconds.size(); ++i) {
    write_point(out, r.point);
    out << ',' << i << ',' << shortest(r.seconds[i]) << ','
        << shortest(r.ns_per_cell_update(r.seconds[i])) << ',' << format_digest(r.digests[i])
        << '\n';
  }
  if (r.seconds.empty()) return;
  const std::pair<const char*, double> summary[] = {
      {"min", r.min_seconds()}, {"median", r.median_seconds()}, {"max", r.max_seconds()}};
  for (const auto& [label, secs] : summary) {
    write_point(out, r.point);
    out << ',' << label << ',' << shortest(secs) << ',' << shortest(r.ns_per_cell_update(secs))
        << ',' << format_digest(r.digests.back()) << '\n';
  }
}

std::vector<BenchResult> read_csv(std::istream& in) {
  std::vector<BenchResult> results;
  std::string line;
  std::size_t lineno = 0;
  bool open = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == kCsvHeader) continue;
    const auto f = split(line);
    if (f.size() != 13) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 13 fields, got " +
                               std::to_string(f.size()));
    }
    const BenchPoint point = read_point(f, lineno);
    const double secs = parse_number<double>(f[10], lineno);
    const std::uint64_t dig = parse_digest(f[12], lineno);
    if (f[9] == "min" || f[9] == "median" || f[9] == "max") {
      if (!open || !(results.back().point == point)) {
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": summary row without repetitions");
      }
      const BenchResult& r = results.back();
      const double expect = f[9] == "min"      ? r.min_seconds()
                            : f[9] == "median" ? r.median_seconds()
                                               : r.max_seconds();
      if (expect != secs) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": summary " + f[9] +
                                 " disagrees with repetitions");
      }
      if (f[9] == "max") open = false;
      continue;
    }
    const auto rep = parse_number<std::size_t>(f[9], lineno);
    if (!open || !(results.back().point == point)) {
      if (rep != 0) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": repetitions must start at 0");
      }
      results.push_back({point, {}, {}});
      open = true;
    } else if (rep != results.back().seconds.size()) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": repetition out of order");
    }
    results.back().seconds.push_back(secs);
    results.back().digests.push_back(dig);
  }
  return results;
}

double BenchResult::ns_per_cell_update(double secs) const {
  return secs * 1e9 / static_cast<double>(point.cell_updates());
}

double BenchResult::min_seconds() const {
  return seconds.empty() ? 0.0 : *std::min_element(seconds.begin(), seconds.end());
}

double BenchResult::max_seconds() const {
  return seconds.empty() ? 0.0 : *std::max_element(seconds.begin(), seconds.end());
}

double BenchResult::median_seconds() const {
  if (seconds.empty()) return 0.0;
  std::vector<double> s = seconds;
  std::sort(s.begin(), s.end());
  const std::size_t m = s.size() / 2;
  return s.size() % 2 ? s[m] : 0.5 * (s[m - 1] + s[m]);
}

}  // namespace stencillab
