#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ifgf/geometry.hpp"
#include "ifgf/morton.hpp"

namespace ifgf {

/// Contiguous interval of Morton-sorted points contained in one box.
struct BoxRecord {
  std::uint32_t first_point = 0;
  std::uint32_t point_count = 0;
  Vec3 center;
};

/// One level of relevant boxes, Morton-sorted, with hash lookup from code to
/// ordinal and CSR adjacency. Children of a box are a contiguous ordinal
/// range on the next level (Morton codes share the parent prefix).
struct OctreeLevel {
  int d = 0;
  double h = 0.0;  // box side H_d
  std::vector<morton::code_t> codes;
  std::vector<BoxRecord> boxes;
  std::vector<std::array<std::uint32_t, 3>> index3;
  std::unordered_map<morton::code_t, std::uint32_t> lookup;
  std::vector<std::uint32_t> parent;       // ordinal on level d-1 (d >= 2)
  std::vector<std::uint32_t> child_begin;  // size()+1 offsets into level d+1 (d < depth)
  // CSR adjacency over ordinals, Morton-sorted. Neighbors include the box
  // itself; cousins are non-neighbors whose parents are parent-neighbors.
  std::vector<std::uint32_t> nbr_off, nbr;
  std::vector<std::uint32_t> cousin_off, cousin;

  std::size_t size() const { return codes.size(); }
};

class LinearOctree {
 public:
  /// Builds levels depth..1 by aggregating the Morton-sorted point runs.
  /// Only relevant boxes (those holding at least one point) are stored.
  /// Throws if the cloud is not Morton-sorted at `depth`.
  static LinearOctree build(const PointCloud& sorted, const BoundingCube& cube, int depth);

  int depth() const { return depth_; }
  const BoundingCube& cube() const { return cube_; }
  const OctreeLevel& level(int d) const { return levels_[d - 1]; }

  /// Morton code of the level-d box containing x. Throws for points outside
  /// the bounding cube.
  morton::code_t box_of_point(Vec3 x, int d) const;

  /// Ordinal of the relevant level-d box whose point interval contains the
  /// sorted point index i.
  std::uint32_t box_of_sorted_point(std::uint32_t i, int d) const;

  // Code-valued spec queries; all lists come back Morton-sorted.
  std::vector<morton::code_t> neighbors(morton::code_t code, int d) const;
  std::vector<morton::code_t> cousins(morton::code_t code, int d) const;
  std::vector<morton::code_t> children(morton::code_t code, int d) const;

 private:
  BoundingCube cube_;
  int depth_ = 0;
  std::vector<OctreeLevel> levels_;
};

}  // namespace ifgf
