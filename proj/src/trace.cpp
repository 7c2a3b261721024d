#include "stencillab/trace.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace stencillab {

ExecutionTrace::ExecutionTrace(unsigned workers, std::size_t capacity_per_worker)
    : logs_(workers) {
  for (Log& log : logs_) log.records.resize(capacity_per_worker);
}

std::int64_t ExecutionTrace::now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool ExecutionTrace::overflow() const {
  return std::any_of(logs_.begin(), logs_.end(), [](const Log& l) { return l.overflow; });
}

std::size_t ExecutionTrace::size() const {
  std::size_t s = 0;
  for (const Log& l : logs_) s += l.size;
  return s;
}

void ExecutionTrace::clear() {
  for (Log& l : logs_) {
    l.size = 0;
    l.overflow = false;
  }
}

std::vector<TraceRecord> ExecutionTrace::merged() const {
  if (overflow()) throw std::length_error("trace log capacity exceeded");
  std::vector<TraceRecord> all;
  all.reserve(size());
  for (const Log& l : logs_) {
    all.insert(all.end(), l.records.begin(),
               l.records.begin() + static_cast<std::ptrdiff_t>(l.size));
  }
  std::stable_sort(all.begin(), all.end(), [](const TraceRecord& a, const TraceRecord& b) {
    return a.start != b.start ? a.start < b.start : a.worker < b.worker;
  });
  return all;
}

std::vector<ExclusionViolation> check_adjacency_exclusion(std::span<const TraceRecord> trace,
                                                          const Stencil& stencil,
                                                          const MeshShape& shape) {
  std::vector<const TraceRecord*> order;
  order.reserve(trace.size());
  for (const auto& r : trace) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const TraceRecord* a, const TraceRecord* b) { return a->start < b->start; });

  // An update never takes zero time; equal stamps mean the clock was too
  // coarse, so every record spans at least one tick.
  auto end_of = [](const TraceRecord* r) { return std::max(r->end, r->start + 1); };

  // Open intervals. Every scanned entry either overlaps the new record or
  // is retired, which keeps the sweep at O(R log R + overlaps).
  std::vector<const TraceRecord*> active;
  std::vector<ExclusionViolation> violations;

  for (const TraceRecord* r : order) {
    const CellCoord rc = shape.coord(r->cell);
    for (std::size_t i = 0; i < active.size();) {
      const TraceRecord* a = active[i];
      if (end_of(a) <= r->start) {
        active[i] = active.back();
        active.pop_back();
        continue;
      }
      // A worker runs one update at a time, so only cross-worker pairs count.
      if (a->worker != r->worker &&
          (a->cell == r->cell || stencil.adjacent(shape.coord(a->cell), rc))) {
        violations.push_back({*a, *r});
      }
      ++i;
    }
    active.push_back(r);
  }
  return violations;
}

std::vector<taskrt::DependenceEdge> check_edge_order(
    std::span<const TraceRecord> trace, std::span<const taskrt::DependenceEdge> edges) {
  struct Span {
    std::int64_t start, end;
  };
  std::unordered_map<taskrt::TaskId, Span> spans;
  for (const auto& r : trace) {
    auto [it, fresh] = spans.try_emplace(r.task, Span{r.start, r.end});
    if (!fresh) {
      it->second.start = std::min(it->second.start, r.start);
      it->second.end = std::max(it->second.end, r.end);
    }
  }
  std::vector<taskrt::DependenceEdge> bad;
  for (const auto& e : edges) {
    auto a = spans.find(e.from);
    auto b = spans.find(e.to);
    if (a == spans.end() || b == spans.end()) continue;
    if (a->second.end > b->second.start) bad.push_back(e);
  }
  return bad;
}

std::vector<std::size_t> check_write_counts(std::span<const TraceRecord> trace,
                                            const MeshShape& shape, std::size_t sweeps) {
  std::vector<std::size_t> count(shape.buffer_size(), 0);
  for (const auto& r : trace) {
    if (r.cell < count.size()) ++count[r.cell];
  }
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < count.size(); ++i) {
    const std::size_t want = shape.is_interior(i) ? sweeps : 0;
    if (count[i] != want) bad.push_back(i);
  }
  return bad;
}

AssignmentMap build_assignment_map(std::span<const TraceRecord> trace, const MeshShape& shape,
                                   std::size_t sweep) {
  const std::size_t cells = shape.interior_count();
  std::vector<std::vector<const TraceRecord*>> per_cell(cells);
  for (const auto& r : trace) {
    if (r.cell >= shape.buffer_size() || !shape.is_interior(r.cell)) continue;
    per_cell[shape.interior_rank(r.cell)].push_back(&r);
  }
  AssignmentMap map{shape, std::vector<int>(cells, -1)};
  std::vector<std::size_t> missing;
  for (std::size_t rank = 0; rank < cells; ++rank) {
    auto& recs = per_cell[rank];
    if (recs.size() <= sweep) {
      missing.push_back(rank);
      continue;
    }
    std::nth_element(recs.begin(), recs.begin() + static_cast<std::ptrdiff_t>(sweep), recs.end(),
                     [](const TraceRecord* a, const TraceRecord* b) { return a->start < b->start; });
    map.worker[rank] = static_cast<int>(recs[sweep]->worker);
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "trace lacks sweep " << sweep << " for " << missing.size() << " cell(s):";
    const auto all = interior_cells(shape);
    std::size_t shown = 0;
    for (std::size_t rank : missing) {
      if (++shown > 16) {
        msg << " ...";
        break;
      }
      const CellCoord& c = all[rank];
      msg << " (" << c[0] << ',' << c[1];
      if (shape.dim == 3) msg << ',' << c[2];
      msg << ')';
    }
    std::vector<std::size_t> flat;
    for (std::size_t rank : missing) flat.push_back(shape.index(all[rank]));
    throw IncompleteTraceError(msg.str(), std::move(flat));
  }
  return map;
}

namespace {

constexpr std::array<Rgb, 16> kPalette{{
    {0xe6, 0x19, 0x4b}, {0x3c, 0xb4, 0x4b}, {0x43, 0x63, 0xd8}, {0xff, 0xe1, 0x19},
    {0xf5, 0x82, 0x31}, {0x91, 0x1e, 0xb4}, {0x42, 0xd4, 0xf4}, {0xf0, 0x32, 0xe6},
    {0xbf, 0xef, 0x45}, {0xfa, 0xbe, 0xd4}, {0x46, 0x99, 0x90}, {0xdc, 0xbe, 0xff},
    {0x9a, 0x63, 0x24}, {0x80, 0x00, 0x00}, {0x00, 0x00, 0x75}, {0x80, 0x80, 0x80},
}};

}  // namespace

std::span<const Rgb> worker_palette() { return kPalette; }

std::string render_assignment_map(const AssignmentMap& map, std::optional<int> slice) {
  const MeshShape& shape = map.shape;
  const int p = shape.n + 2;
  const int z = shape.dim == 3 ? slice.value_or((shape.n + 1) / 2) : 0;
  if (shape.dim == 3 && (z < 1 || z > shape.n)) {
    throw std::out_of_range("z-slice outside the interior");
  }

  std::ostringstream out;
  out << "P6\n# palette worker%16:";
  char hex[8];
  for (std::size_t i = 0; i < kPalette.size(); ++i) {
    std::snprintf(hex, sizeof hex, "%02x%02x%02x", kPalette[i].r, kPalette[i].g, kPalette[i].b);
    out << ' ' << i << '=' << hex;
  }
  out << "\n" << p << ' ' << p << "\n255\n";

  std::string pixels;
  pixels.reserve(static_cast<std::size_t>(p * p * 3));
  for (int y = 0; y < p; ++y) {
    for (int x = 0; x < p; ++x) {
      const bool halo = x == 0 || y == 0 || x == p - 1 || y == p - 1;
      Rgb c{0xff, 0xff, 0xff};
      if (!halo) {
        const CellCoord cc = shape.dim == 3 ? CellCoord(x, y, z) : CellCoord(x, y);
        const int w = map.at(cc);
        if (w >= 0) c = kPalette[static_cast<std::size_t>(w) % kPalette.size()];
      }
      pixels.push_back(static_cast<char>(c.r));
      pixels.push_back(static_cast<char>(c.g));
      pixels.push_back(static_cast<char>(c.b));
    }
  }
  return out.str() + pixels;
}

bool band_contiguity(const AssignmentMap& map, std::span<const int> colour) {
  if (colour.size() != map.worker.size()) {
    throw std::invalid_argument("colour partition does not match the map");
  }
  // For each colour: workers whose run has ended.
  std::map<int, std::vector<int>> closed;
  std::map<int, int> current;
  for (std::size_t rank = 0; rank < map.worker.size(); ++rank) {
    const int c = colour[rank];
    const int w = map.worker[rank];
    auto it = current.find(c);
    if (it != current.end() && it->second == w) continue;
    auto& done = closed[c];
    if (std::find(done.begin(), done.end(), w) != done.end()) return false;
    if (it != current.end()) {
      done.push_back(it->second);
      it->second = w;
    } else {
      current[c] = w;
    }
  }
  return true;
}

void write_trace_dump(std::ostream& out, std::span<const TraceRecord> trace) {
  for (const auto& r : trace) {
    out << r.task << ' ' << r.worker << ' ' << r.cell << ' ' << r.start << ' ' << r.end << '\n';
  }
}

std::vector<TraceRecord> read_trace_dump(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    TraceRecord r;
    if (!(ls >> r.task >> r.worker >> r.cell >> r.start >> r.end)) {
      throw std::runtime_error("malformed trace line " + std::to_string(lineno));
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace stencillab
