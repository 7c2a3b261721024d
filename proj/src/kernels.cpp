#include "stencillab/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace stencillab {

std::string_view to_string(StencilKind kind) {
  switch (kind) {
    case StencilKind::FD5: return "fd5";
    case StencilKind::FE9: return "fe9";
    case StencilKind::FD7: return "fd7";
    case StencilKind::FE27: return "fe27";
  }
  return "?";
}

std::optional<StencilKind> parse_stencil(std::string_view text) {
  for (auto k : {StencilKind::FD5, StencilKind::FE9, StencilKind::FD7, StencilKind::FE27}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

int stencil_dim(StencilKind kind) {
  return (kind == StencilKind::FD5 || kind == StencilKind::FE9) ? 2 : 3;
}

Stencil::Stencil(StencilKind kind) : kind_(kind), dim_(stencil_dim(kind)) {
  const bool full = (kind == StencilKind::FE9 || kind == StencilKind::FE27);
  const int zr = dim_ == 3 ? 1 : 0;
  // Enumerated z, y, x with x fastest so offsets come out lexicographic.
  for (int dz = -zr; dz <= zr; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (manhattan == 0) continue;
        if (!full && manhattan != 1) continue;
        offsets_[static_cast<std::size_t>(count_++)].d = {dx, dy, dz};
      }
    }
  }
  int_centre_ = static_cast<double>(count_);
  if (kind == StencilKind::FE9) scale_ = 1.0 / 3.0;
}

bool Stencil::adjacent(const CellCoord& a, const CellCoord& b) const {
  for (int j = 0; j < count_; ++j) {
    const auto& d = offsets_[static_cast<std::size_t>(j)].d;
    bool match = true;
    for (int ax = 0; ax < dim_; ++ax) {
      if (b[ax] - a[ax] != d[static_cast<std::size_t>(ax)]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

BoundStencil::BoundStencil(const Stencil& stencil, const MeshShape& shape)
    : stencil_(stencil), shape_(shape) {
  if (stencil.dim() != shape.dim) {
    throw std::invalid_argument(std::string(to_string(stencil.kind())) +
                                " stencil needs a " + std::to_string(stencil.dim()) +
                                "D mesh");
  }
  const auto p = static_cast<std::ptrdiff_t>(shape.padded());
  for (int j = 0; j < stencil.size(); ++j) {
    const auto& d = stencil.offset(j).d;
    flat_[static_cast<std::size_t>(j)] = d[0] + p * (d[1] + p * d[2]);
  }
}

CostModel CostModel::constant(int k) {
  if (k < 0) throw std::invalid_argument("cost k must be non-negative");
  CostModel m;
  m.k_ = k;
  return m;
}

CostModel CostModel::ramp() {
  CostModel m;
  m.ramp_ = true;
  return m;
}

int CostModel::k(std::size_t rank, std::size_t total) const {
  if (rank >= total) throw std::out_of_range("cell rank outside [0, total)");
  if (!ramp_) return k_;
  return static_cast<int>(std::min<std::size_t>(100 * rank / total, 99));
}

std::string CostModel::to_string() const {
  return ramp_ ? std::string("ramp") : "const:" + std::to_string(k_);
}

std::optional<CostModel> CostModel::parse(std::string_view text) {
  if (text == "ramp") return ramp();
  constexpr std::string_view prefix = "const:";
  if (!text.starts_with(prefix)) return std::nullopt;
  text.remove_prefix(prefix.size());
  int k = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc() || ptr != text.data() + text.size() || k < 0) return std::nullopt;
  return constant(k);
}

namespace {

// The k sines feed an accumulator that is folded in times zero: the entry
// is unchanged bit for bit but the work cannot be elided without fast-math.
inline double costed_entry(double entry, int k, double arg) {
  double dummy = 0.0;
  for (int i = 0; i < k; ++i) dummy += std::sin(arg + static_cast<double>(i));
  return entry + 0.0 * dummy;
}

}  // namespace

double update_cell(Mesh& mesh, const BoundStencil& bound, std::size_t flat, int k) {
  const Stencil& s = bound.stencil();
  double* u = mesh.data();
  // Offsets from the first neighbour, so a constant field stays exact.
  const double ref = u[static_cast<std::ptrdiff_t>(flat) + bound.flat_offset(0)];
  double sum = 0.0;
  for (int j = 0; j < s.size(); ++j) {
    const double v = u[static_cast<std::ptrdiff_t>(flat) + bound.flat_offset(j)];
    const double w = k > 0 ? costed_entry(s.int_weight(), k, v) : s.int_weight();
    sum -= w * (v - ref);
  }
  const double centre = k > 0 ? costed_entry(s.int_centre(), k, u[flat]) : s.int_centre();
  const double next = ref + sum / centre;
  if (!std::isfinite(next)) {
    throw NumericalError("non-finite update at flat index " + std::to_string(flat));
  }
  u[flat] = next;
  return next;
}

double update_cell(Mesh& mesh, const Stencil& stencil, const CellCoord& c, int k) {
  const std::size_t flat = mesh.index(c);
  if (!mesh.shape().is_interior(flat)) throw std::out_of_range("update_cell on a halo cell");
  return update_cell(mesh, BoundStencil(stencil, mesh.shape()), flat, k);
}

double residual_max(const Mesh& mesh, const Stencil& stencil) {
  const BoundStencil bound(stencil, mesh.shape());
  const double* u = mesh.data();
  double worst = 0.0;
  const std::size_t total = mesh.shape().buffer_size();
  for (std::size_t i = 0; i < total; ++i) {
    if (!mesh.shape().is_interior(i)) continue;
    // Row sums vanish, so centre*u + w*sum(u_j) == w*sum(u_j - u).
    double r = 0.0;
    for (int j = 0; j < stencil.size(); ++j) {
      r += u[static_cast<std::ptrdiff_t>(i) + bound.flat_offset(j)] - u[i];
    }
    r *= stencil.int_weight();
    worst = std::max(worst, std::abs(stencil.scale() * r));
  }
  return worst;
}

}  // namespace stencillab
