#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "stencillab/mesh.hpp"

namespace stencillab {

enum class StencilKind { FD5, FE9, FD7, FE27 };

std::string_view to_string(StencilKind kind);
std::optional<StencilKind> parse_stencil(std::string_view text);
int stencil_dim(StencilKind kind);

struct Offset {
  std::array<int, 3> d{};
};

/// Weights and neighbour offsets of one compact stencil.
///
/// Weights are held as small integers times a common scale, so FE9 is
/// stored as {-1, 8} x 1/3. The relaxation ratio is scale-free and row sums
/// vanish exactly in floating point.
class Stencil {
 public:
  static constexpr int kMaxOffsets = 26;

  explicit Stencil(StencilKind kind);

  StencilKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int size() const { return count_; }  // neighbours, centre excluded
  const Offset& offset(int j) const { return offsets_[static_cast<std::size_t>(j)]; }
  double weight(int /*j*/) const { return scale_ * int_weight_; }
  double centre_weight() const { return scale_ * int_centre_; }
  double int_weight() const { return int_weight_; }
  double int_centre() const { return int_centre_; }
  double scale() const { return scale_; }

  /// True iff b - a is one of the neighbour offsets.
  bool adjacent(const CellCoord& a, const CellCoord& b) const;

 private:
  StencilKind kind_;
  int dim_;
  int count_ = 0;
  std::array<Offset, kMaxOffsets> offsets_{};
  double int_weight_ = -1.0;
  double int_centre_ = 0.0;
  double scale_ = 1.0;
};

/// Stencil offsets resolved to flat displacements for one mesh shape.
class BoundStencil {
 public:
  BoundStencil(const Stencil& stencil, const MeshShape& shape);

  const Stencil& stencil() const { return stencil_; }
  const MeshShape& shape() const { return shape_; }
  int size() const { return stencil_.size(); }
  std::ptrdiff_t flat_offset(int j) const { return flat_[static_cast<std::size_t>(j)]; }

 private:
  Stencil stencil_;
  MeshShape shape_;
  std::array<std::ptrdiff_t, Stencil::kMaxOffsets> flat_{};
};

/// Synthetic per-cell extra work: k sine evaluations per stencil entry.
class CostModel {
 public:
  static CostModel constant(int k);
  static CostModel ramp();

  bool is_ramp() const { return ramp_; }
  int constant_k() const { return k_; }

  /// Constant mode returns k; ramp returns floor(100 rank / total).
  /// Throws std::out_of_range unless 0 <= rank < total.
  int k(std::size_t rank, std::size_t total) const;

  std::string to_string() const;  // "const:<k>" or "ramp"
  static std::optional<CostModel> parse(std::string_view text);

  friend bool operator==(const CostModel&, const CostModel&) = default;

 private:
  bool ramp_ = false;
  int k_ = 0;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gauss-Seidel relaxation of one interior cell, written in place.
/// Returns the new value. Throws NumericalError on a non-finite result.
double update_cell(Mesh& mesh, const BoundStencil& stencil, std::size_t flat, int k);
double update_cell(Mesh& mesh, const Stencil& stencil, const CellCoord& c, int k);

/// Max over interior cells of |A u| for the stencil operator A.
double residual_max(const Mesh& mesh, const Stencil& stencil);

}  // namespace stencillab
