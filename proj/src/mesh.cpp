#include "stencillab/mesh.hpp"

#include <bit>
#include <random>
#include <stdexcept>
#include <string>

namespace stencillab {

std::size_t MeshShape::buffer_size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= padded();
  return s;
}

std::size_t MeshShape::interior_count() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

std::size_t MeshShape::index(const CellCoord& c) const {
  if (c.dim() != dim) {
    throw std::out_of_range("coordinate has dimension " + std::to_string(c.dim()) +
                            ", mesh has " + std::to_string(dim));
  }
  std::size_t flat = 0;
  for (int a = dim - 1; a >= 0; --a) {
    if (c[a] < 0 || c[a] > n + 1) {
      throw std::out_of_range("coordinate " + std::to_string(c[a]) + " on axis " +
                              std::to_string(a) + " outside [0, " + std::to_string(n + 1) + "]");
    }
    flat = flat * padded() + static_cast<std::size_t>(c[a]);
  }
  return flat;
}

CellCoord MeshShape::coord(std::size_t flat) const {
  const std::size_t p = padded();
  const int x = static_cast<int>(flat % p);
  flat /= p;
  const int y = static_cast<int>(flat % p);
  if (dim == 2) return {x, y};
  return {x, y, static_cast<int>(flat / p)};
}

bool MeshShape::is_interior(std::size_t flat) const {
  const std::size_t p = padded();
  for (int a = 0; a < dim; ++a) {
    const std::size_t v = flat % p;
    if (v == 0 || v == p - 1) return false;
    flat /= p;
  }
  return true;
}

std::size_t MeshShape::interior_rank(std::size_t flat) const {
  const std::size_t p = padded();
  const std::size_t nn = static_cast<std::size_t>(n);
  std::size_t rank = 0;
  std::size_t stride = 1;
  for (int a = 0; a < dim; ++a) {
    rank += (flat % p - 1) * stride;
    stride *= nn;
    flat /= p;
  }
  return rank;
}

Mesh::Mesh(int dim, int n) : shape_{dim, n} {
  if (dim != 2 && dim != 3) throw std::invalid_argument("mesh dimension must be 2 or 3");
  if (n < 1) throw std::invalid_argument("mesh extent must be at least 1");
  values_.assign(shape_.buffer_size(), 0.0);
}

void Mesh::init(std::uint64_t seed, double boundary_value) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (shape_.is_interior(i)) {
      values_[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    } else {
      values_[i] = boundary_value;
    }
  }
}

void Mesh::fill(double value) { values_.assign(values_.size(), value); }

std::vector<CellCoord> interior_cells(const MeshShape& shape) {
  std::vector<CellCoord> cells;
  cells.reserve(shape.interior_count());
  const int n = shape.n;
  if (shape.dim == 2) {
    for (int y = 1; y <= n; ++y)
      for (int x = 1; x <= n; ++x) cells.emplace_back(x, y);
  } else {
    for (int z = 1; z <= n; ++z)
      for (int y = 1; y <= n; ++y)
        for (int x = 1; x <= n; ++x) cells.emplace_back(x, y, z);
  }
  return cells;
}

std::vector<std::size_t> halo_indices(const MeshShape& shape) {
  std::vector<std::size_t> out;
  const std::size_t total = shape.buffer_size();
  for (std::size_t i = 0; i < total; ++i)
    if (!shape.is_interior(i)) out.push_back(i);
  return out;
}

std::uint64_t digest(const Mesh& mesh) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : mesh.values()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace stencillab
