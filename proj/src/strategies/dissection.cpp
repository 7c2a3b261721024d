#include <algorithm>

#include "stencillab/strategies.hpp"

namespace stencillab {

bool Box::empty() const {
  for (int a = 0; a < dim; ++a)
    if (extent(a) <= 0) return true;
  return false;
}

std::size_t Box::count() const {
  if (empty()) return 0;
  std::size_t c = 1;
  for (int a = 0; a < dim; ++a) c *= static_cast<std::size_t>(extent(a));
  return c;
}

bool Box::contains(const CellCoord& c) const {
  for (int a = 0; a < dim; ++a) {
    const auto i = static_cast<std::size_t>(a);
    if (c[a] < lo[i] || c[a] > hi[i]) return false;
  }
  return true;
}

Box Box::whole(const MeshShape& shape) {
  Box b;
  b.dim = shape.dim;
  for (int a = 0; a < shape.dim; ++a) b.hi[static_cast<std::size_t>(a)] = shape.n;
  return b;
}

namespace {

template <class Visit>
void for_each_cell(const Box& box, Visit&& visit) {
  if (box.empty()) return;
  if (box.dim == 2) {
    for (int y = box.lo[1]; y <= box.hi[1]; ++y)
      for (int x = box.lo[0]; x <= box.hi[0]; ++x) visit(CellCoord(x, y));
  } else {
    for (int z = box.lo[2]; z <= box.hi[2]; ++z)
      for (int y = box.lo[1]; y <= box.hi[1]; ++y)
        for (int x = box.lo[0]; x <= box.hi[0]; ++x) visit(CellCoord(x, y, z));
  }
}

DissectionNode build(const Box& region, int depth, int levels) {
  DissectionNode node;
  node.region = region;
  node.depth = depth;
  if (depth >= levels) return node;
  for (int a = 0; a < region.dim; ++a)
    if (region.extent(a) <= 2) return node;

  for (int a = 0; a < region.dim; ++a) {
    const auto i = static_cast<std::size_t>(a);
    node.mid[i] = region.lo[i] + region.extent(a) / 2;
  }
  const int octants = 1 << region.dim;
  node.children.reserve(static_cast<std::size_t>(octants));
  for (int o = 0; o < octants; ++o) {
    Box child = region;
    for (int a = 0; a < region.dim; ++a) {
      const auto i = static_cast<std::size_t>(a);
      if ((o >> a) & 1) {
        child.lo[i] = node.mid[i] + 1;
      } else {
        child.hi[i] = node.mid[i] - 1;
      }
    }
    node.children.push_back(build(child, depth + 1, levels));
  }
  return node;
}

}  // namespace

std::vector<CellCoord> DissectionNode::separator() const {
  std::vector<CellCoord> out;
  if (leaf()) return out;
  for_each_cell(region, [&](const CellCoord& c) {
    for (int a = 0; a < region.dim; ++a) {
      if (c[a] == mid[static_cast<std::size_t>(a)]) {
        out.push_back(c);
        return;
      }
    }
  });
  return out;
}

std::vector<CellCoord> DissectionNode::own_cells() const {
  if (!leaf()) return separator();
  std::vector<CellCoord> out;
  for_each_cell(region, [&](const CellCoord& c) { out.push_back(c); });
  return out;
}

std::size_t DissectionNode::leaf_count() const {
  if (leaf()) return 1;
  std::size_t s = 0;
  for (const auto& c : children) s += c.leaf_count();
  return s;
}

int DissectionNode::height() const {
  int h = 0;
  for (const auto& c : children) h = std::max(h, 1 + c.height());
  return h;
}

int dissection_levels(unsigned threads, int dim) {
  int level = 0;
  while ((std::size_t{1} << (dim * level)) < threads) ++level;
  return level + 1;
}

DissectionNode dissect(const Box& region, unsigned threads, int dim) {
  Box r = region;
  r.dim = dim;
  return build(r, 0, dissection_levels(std::max(threads, 1U), dim));
}

FlatDissection flatten(const DissectionNode& node, const MeshShape& shape) {
  FlatDissection flat;
  for (const CellCoord& c : node.own_cells()) flat.cells.push_back(shape.index(c));
  for (const auto& child : node.children) flat.children.push_back(flatten(child, shape));
  return flat;
}

}  // namespace stencillab
