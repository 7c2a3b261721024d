#include "stencillab/strategies.hpp"

#include "colour_loops.hpp"

namespace stencillab {

int colour_count(StencilKind kind) {
  switch (kind) {
    case StencilKind::FD5:
    case StencilKind::FD7: return 2;
    case StencilKind::FE9: return 4;
    case StencilKind::FE27: return 8;
  }
  return 0;
}

int colour_of(StencilKind kind, const CellCoord& c) {
  // Parities are taken from the first interior cell, so (1,1) is colour 0.
  const int dim = stencil_dim(kind);
  if (colour_count(kind) == 2) {
    int sum = 0;
    for (int a = 0; a < dim; ++a) sum += c[a] - 1;
    return sum & 1;
  }
  int colour = 0;
  for (int a = 0; a < dim; ++a) colour |= ((c[a] - 1) & 1) << a;
  return colour;
}

std::vector<std::size_t> colour_cells(const MeshShape& shape, StencilKind kind, int colour) {
  const detail::ColourLoop loop(shape, kind, colour, Fault::None);
  std::vector<std::size_t> out;
  loop.visit_rows(0, loop.rows(), [&](std::size_t flat) { out.push_back(flat); });
  return out;
}

std::vector<std::size_t> colour_major_order(const MeshShape& shape, StencilKind kind) {
  std::vector<std::size_t> out;
  out.reserve(shape.interior_count());
  for (int p = 0; p < colour_count(kind); ++p) {
    auto cells = colour_cells(shape, kind, p);
    out.insert(out.end(), cells.begin(), cells.end());
  }
  return out;
}

std::vector<std::size_t> lexicographic_order(const MeshShape& shape) {
  std::vector<std::size_t> out;
  out.reserve(shape.interior_count());
  for (const CellCoord& c : interior_cells(shape)) out.push_back(shape.index(c));
  return out;
}

}  // namespace stencillab
