#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace stencillab {

/// A cell position on a mesh. Unused trailing axes are zero.
class CellCoord {
 public:
  CellCoord() = default;
  CellCoord(int x, int y) : v_{x, y, 0}, dim_(2) {}
  CellCoord(int x, int y, int z) : v_{x, y, z}, dim_(3) {}

  int dim() const { return dim_; }
  int operator[](int axis) const { return v_[static_cast<std::size_t>(axis)]; }
  int& operator[](int axis) { return v_[static_cast<std::size_t>(axis)]; }

  friend bool operator==(const CellCoord&, const CellCoord&) = default;

 private:
  std::array<int, 3> v_{};
  int dim_ = 2;
};

/// Extents of a mesh: dimension and interior cells per axis. The stored
/// buffer carries a one-cell halo, so each axis has n + 2 entries.
struct MeshShape {
  int dim = 2;
  int n = 0;

  std::size_t padded() const { return static_cast<std::size_t>(n) + 2; }
  std::size_t buffer_size() const;
  std::size_t interior_count() const;

  std::size_t index(const CellCoord& c) const;  // throws std::out_of_range
  CellCoord coord(std::size_t flat) const;
  bool is_interior(std::size_t flat) const;
  /// Lexicographic rank among interior cells (outer axis slowest).
  std::size_t interior_rank(std::size_t flat) const;

  friend bool operator==(const MeshShape&, const MeshShape&) = default;
};

/// d-dimensional Cartesian cell values with a fixed-value halo of width one.
/// Row-major, x fastest. Workers may write disjoint cells concurrently.
class Mesh {
 public:
  Mesh(int dim, int n);

  const MeshShape& shape() const { return shape_; }
  int dim() const { return shape_.dim; }
  int n() const { return shape_.n; }

  std::size_t index(const CellCoord& c) const { return shape_.index(c); }

  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  double& at(const CellCoord& c) { return values_[index(c)]; }
  double at(const CellCoord& c) const { return values_[index(c)]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Halo := boundary_value. Interior drawn from [0,1) with mt19937_64,
  /// top 53 bits of each draw, cells visited in lexicographic order.
  void init(std::uint64_t seed, double boundary_value = 0.0);
  void fill(double value);

  friend bool operator==(const Mesh& a, const Mesh& b) {
    return a.shape_ == b.shape_ && a.values_ == b.values_;
  }

 private:
  MeshShape shape_;
  std::vector<double> values_;
};

/// All interior coordinates, lexicographic with the outer axis slowest.
std::vector<CellCoord> interior_cells(const MeshShape& shape);

/// Flat indices of all halo cells in ascending order.
std::vector<std::size_t> halo_indices(const MeshShape& shape);

/// FNV-1a over the little-endian bytes of every value.
std::uint64_t digest(const Mesh& mesh);

}  // namespace stencillab
