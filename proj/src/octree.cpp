#include "ifgf/octree.hpp"

#include <algorithm>
#include <stdexcept>

namespace ifgf {

namespace {

Vec3 box_center(const BoundingCube& cube, std::array<std::uint32_t, 3> k, double h) {
  return {cube.origin.x + (k[0] + 0.5) * h,
          cube.origin.y + (k[1] + 0.5) * h,
          cube.origin.z + (k[2] + 0.5) * h};
}

}  // namespace

LinearOctree LinearOctree::build(const PointCloud& pc, const BoundingCube& cube, int depth) {
  if (depth < 3 || depth > morton::kMaxLevel)
    throw std::invalid_argument("LinearOctree: depth must be in [3, 21]");
  if (pc.size() == 0) throw std::invalid_argument("LinearOctree: empty cloud");

  LinearOctree tree;
  tree.cube_ = cube;
  tree.depth_ = depth;
  tree.levels_.resize(depth);

  // Finest level from runs of equal point codes; a decreasing code means the
  // cloud was not Morton-sorted.
  std::vector<morton::code_t> codes(pc.size());
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const auto k = morton::grid_index(pc.point(i), cube, depth);
    codes[i] = morton::encode(k[0], k[1], k[2], depth);
    if (i > 0 && codes[i] < codes[i - 1])
      throw std::invalid_argument("LinearOctree: cloud is not Morton-sorted");
  }

  {
    OctreeLevel& lvl = tree.levels_[depth - 1];
    lvl.d = depth;
    lvl.h = cube.side / static_cast<double>(1u << (depth - 1));
    std::size_t i = 0;
    while (i < pc.size()) {
      std::size_t j = i;
      while (j < pc.size() && codes[j] == codes[i]) ++j;
      const auto k = morton::decode(codes[i], depth);
      lvl.codes.push_back(codes[i]);
      lvl.index3.push_back(k);
      lvl.boxes.push_back({static_cast<std::uint32_t>(i),
                           static_cast<std::uint32_t>(j - i),
                           box_center(cube, k, lvl.h)});
      i = j;
    }
  }

  // Coarser levels by merging runs of children sharing a code prefix.
  for (int d = depth - 1; d >= 1; --d) {
    OctreeLevel& lvl = tree.levels_[d - 1];
    const OctreeLevel& fine = tree.levels_[d];
    lvl.d = d;
    lvl.h = cube.side / static_cast<double>(1u << (d - 1));
    std::size_t i = 0;
    while (i < fine.size()) {
      const morton::code_t code = fine.codes[i] >> 3;
      std::size_t j = i;
      while (j < fine.size() && (fine.codes[j] >> 3) == code) ++j;
      const auto k = morton::decode(code, d);
      const std::uint32_t first = fine.boxes[i].first_point;
      const std::uint32_t last =
          fine.boxes[j - 1].first_point + fine.boxes[j - 1].point_count;
      lvl.codes.push_back(code);
      lvl.index3.push_back(k);
      lvl.boxes.push_back({first, last - first, box_center(cube, k, lvl.h)});
      i = j;
    }
  }

  for (int d = 1; d <= depth; ++d) {
    OctreeLevel& lvl = tree.levels_[d - 1];
    lvl.lookup.reserve(lvl.size() * 2);
    for (std::uint32_t b = 0; b < lvl.size(); ++b) lvl.lookup.emplace(lvl.codes[b], b);
  }

  // Parent links and child ranges.
  for (int d = 2; d <= depth; ++d) {
    OctreeLevel& lvl = tree.levels_[d - 1];
    OctreeLevel& up = tree.levels_[d - 2];
    lvl.parent.resize(lvl.size());
    up.child_begin.assign(up.size() + 1, 0);
    for (std::uint32_t b = 0; b < lvl.size(); ++b)
      lvl.parent[b] = up.lookup.at(lvl.codes[b] >> 3);
    for (std::uint32_t b = 0; b < lvl.size(); ++b) up.child_begin[lvl.parent[b] + 1]++;
    for (std::size_t p = 0; p < up.size(); ++p) up.child_begin[p + 1] += up.child_begin[p];
  }

  // Neighbor CSR (Chebyshev index distance <= 1, including the box itself).
  for (int d = 1; d <= depth; ++d) {
    OctreeLevel& lvl = tree.levels_[d - 1];
    const std::uint32_t n = 1u << (d - 1);
    lvl.nbr_off.assign(lvl.size() + 1, 0);
    for (std::uint32_t b = 0; b < lvl.size(); ++b) {
      const auto k = lvl.index3[b];
      std::uint32_t found[27];
      int cnt = 0;
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const std::int64_t jx = static_cast<std::int64_t>(k[0]) + dx;
            const std::int64_t jy = static_cast<std::int64_t>(k[1]) + dy;
            const std::int64_t jz = static_cast<std::int64_t>(k[2]) + dz;
            if (jx < 0 || jy < 0 || jz < 0 || jx >= n || jy >= n || jz >= n) continue;
            const morton::code_t c = morton::encode(
                static_cast<std::uint32_t>(jx), static_cast<std::uint32_t>(jy),
                static_cast<std::uint32_t>(jz), d);
            auto it = lvl.lookup.find(c);
            if (it != lvl.lookup.end()) found[cnt++] = it->second;
          }
      std::sort(found, found + cnt);
      lvl.nbr.insert(lvl.nbr.end(), found, found + cnt);
      lvl.nbr_off[b + 1] = static_cast<std::uint32_t>(lvl.nbr.size());
    }
  }

  // Cousin CSR: children of parent-neighbors at Chebyshev distance > 1.
  // Parent-neighbor ranges are visited in Morton order, so the result stays
  // Morton-sorted without an extra sort.
  for (int d = 3; d <= depth; ++d) {
    OctreeLevel& lvl = tree.levels_[d - 1];
    const OctreeLevel& up = tree.levels_[d - 2];
    lvl.cousin_off.assign(lvl.size() + 1, 0);
    for (std::uint32_t b = 0; b < lvl.size(); ++b) {
      const auto k = lvl.index3[b];
      const std::uint32_t pb = lvl.parent[b];
      for (std::uint32_t pi = up.nbr_off[pb]; pi < up.nbr_off[pb + 1]; ++pi) {
        const std::uint32_t pn = up.nbr[pi];
        for (std::uint32_t c = up.child_begin[pn]; c < up.child_begin[pn + 1]; ++c) {
          const auto j = lvl.index3[c];
          const std::uint32_t dist =
              std::max({j[0] > k[0] ? j[0] - k[0] : k[0] - j[0],
                        j[1] > k[1] ? j[1] - k[1] : k[1] - j[1],
                        j[2] > k[2] ? j[2] - k[2] : k[2] - j[2]});
          if (dist > 1) lvl.cousin.push_back(c);
        }
      }
      lvl.cousin_off[b + 1] = static_cast<std::uint32_t>(lvl.cousin.size());
    }
  }

  return tree;
}

morton::code_t LinearOctree::box_of_point(Vec3 x, int d) const {
  const auto k = morton::grid_index(x, cube_, d);
  return morton::encode(k[0], k[1], k[2], d);
}

std::uint32_t LinearOctree::box_of_sorted_point(std::uint32_t i, int d) const {
  const OctreeLevel& lvl = level(d);
  // Intervals are consecutive in Morton order; binary-search the starts.
  std::uint32_t lo = 0, hi = static_cast<std::uint32_t>(lvl.size());
  while (hi - lo > 1) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (lvl.boxes[mid].first_point <= i) lo = mid;
    else hi = mid;
  }
  return lo;
}

std::vector<morton::code_t> LinearOctree::neighbors(morton::code_t code, int d) const {
  const OctreeLevel& lvl = level(d);
  const std::uint32_t b = lvl.lookup.at(code);
  std::vector<morton::code_t> out;
  out.reserve(lvl.nbr_off[b + 1] - lvl.nbr_off[b]);
  for (std::uint32_t i = lvl.nbr_off[b]; i < lvl.nbr_off[b + 1]; ++i)
    out.push_back(lvl.codes[lvl.nbr[i]]);
  return out;
}

std::vector<morton::code_t> LinearOctree::cousins(morton::code_t code, int d) const {
  const OctreeLevel& lvl = level(d);
  const std::uint32_t b = lvl.lookup.at(code);
  std::vector<morton::code_t> out;
  out.reserve(lvl.cousin_off[b + 1] - lvl.cousin_off[b]);
  for (std::uint32_t i = lvl.cousin_off[b]; i < lvl.cousin_off[b + 1]; ++i)
    out.push_back(lvl.codes[lvl.cousin[i]]);
  return out;
}

std::vector<morton::code_t> LinearOctree::children(morton::code_t code, int d) const {
  if (d >= depth_) throw std::invalid_argument("children: no finer level");
  const OctreeLevel& lvl = level(d);
  const OctreeLevel& fine = level(d + 1);
  const std::uint32_t b = lvl.lookup.at(code);
  std::vector<morton::code_t> out;
  for (std::uint32_t c = lvl.child_begin[b]; c < lvl.child_begin[b + 1]; ++c)
    out.push_back(fine.codes[c]);
  return out;
}

}  // namespace ifgf
