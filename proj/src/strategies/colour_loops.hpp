#pragma once

#include <cstddef>

#include "stencillab/strategies.hpp"

namespace stencillab::detail {

// The colour pass as a loop nest: the outer axis (y in 2D, z in 3D) is the
// parallel row index, the x loop strides by two.
//
// Two-colour kinds keep every outer row and start x where the sum of
// interior offsets (c - 1) has the pass's parity. Full-stencil kinds pin
// each axis to the colour's bit for that axis: bit 0 starts at 1, bit 1
// at 2.
class ColourLoop {
 public:
  ColourLoop(const MeshShape& shape, StencilKind kind, int colour, Fault fault)
      : n_(shape.n), dim_(shape.dim), p_(shape.padded()), colour_(colour),
        two_colour_(colour_count(kind) == 2), fault_(fault) {
    const int outer_bit = dim_ == 2 ? 1 : 2;
    outer_start_ = two_colour_ ? 1 : 1 + ((colour >> outer_bit) & 1);
    outer_step_ = two_colour_ ? 1 : 2;
    rows_ = outer_start_ > n_ ? 0
                              : static_cast<std::size_t>((n_ - outer_start_) / outer_step_ + 1);
  }

  std::size_t rows() const { return rows_; }

  template <class Visit>
  void visit_rows(std::size_t row_begin, std::size_t row_end, Visit&& visit) const {
    for (std::size_t r = row_begin; r < row_end; ++r) {
      const int outer = outer_start_ + static_cast<int>(r) * outer_step_;
      if (dim_ == 2) {
        visit_x(outer, 0, visit);
      } else {
        const int y0 = two_colour_ ? 1 : 1 + ((colour_ >> 1) & 1);
        const int ys = two_colour_ ? 1 : 2;
        for (int y = y0; y <= n_; y += ys) visit_x(y, outer, visit);
      }
    }
  }

 private:
  template <class Visit>
  void visit_x(int y, int z, Visit& visit) const {
    int x0;
    if (fault_ == Fault::ColumnParity && two_colour_) {
      x0 = colour_ + 1;
    } else if (two_colour_) {
      const int z_offset = dim_ == 3 ? z - 1 : 0;
      x0 = ((colour_ + y + 1 + z_offset) % 2) + 1;
    } else {
      x0 = 1 + (colour_ & 1);
    }
    const std::size_t row = (static_cast<std::size_t>(z) * p_ + static_cast<std::size_t>(y)) * p_;
    for (int x = x0; x <= n_; x += 2) visit(row + static_cast<std::size_t>(x));
  }

  int n_;
  int dim_;
  std::size_t p_;
  int colour_;
  bool two_colour_;
  Fault fault_;
  int outer_start_ = 1;
  int outer_step_ = 1;
  std::size_t rows_ = 0;
};

}  // namespace stencillab::detail
