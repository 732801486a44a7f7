#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ifgf/interp.hpp"
#include "ifgf/octree.hpp"

namespace ifgf {

/// Per-level cone-segment grids in box-centered (s, theta, phi) coordinates,
/// where s = sqrt(3) H_d / (2 r) maps the whole cousin-to-infinity radial
/// range onto (0, s_max]. Segment counts double per level upward, mirroring
/// the eightfold split of cone segments toward coarser levels.
struct ConeGridSpec {
  int depth = 0;  // D; counts below are the level-D counts
  int base_s = 1;
  int base_theta = 2;
  int base_phi = 4;
  InterpOrders orders;

  static constexpr double kSMax = 0.57735026918962576451;  // sqrt(3)/3

  std::array<int, 3> counts(int d) const {
    const int f = 1 << (depth - d);
    return {base_s * f, base_theta * f, base_phi * f};
  }
  std::array<double, 3> widths(int d) const {
    const auto n = counts(d);
    return {kSMax / n[0], std::numbers::pi / n[1], 2.0 * std::numbers::pi / n[2]};
  }
};

struct SphCoords {
  double s = 0.0;      // radial-inverse, decreases toward infinity
  double theta = 0.0;  // elevation from +z, [0, pi]
  double phi = 0.0;    // azimuth, [0, 2 pi)
};

/// Box-centered spherical coordinates of x about a level-d box of side h_d.
SphCoords cone_coords(Vec3 box_center, double h_d, Vec3 x);

/// Cone-segment index components decoded from the linear gamma.
struct ConeKey {
  morton::code_t box = 0;
  std::uint64_t gamma = 0;
  int d = 0;
};

/// Half-open segment bounds in (s, theta, phi); the topmost s and theta
/// segments also carry their upper endpoint (s = s_max, theta = pi).
struct ConeSegment {
  double s_lo, s_hi;
  double t_lo, t_hi;
  double p_lo, p_hi;
};

std::uint64_t gamma_pack(std::array<int, 3> idx, std::array<int, 3> counts);
std::array<int, 3> gamma_unpack(std::uint64_t gamma, std::array<int, 3> counts);
ConeSegment cone_segment(const ConeGridSpec& spec, int d, std::uint64_t gamma);

/// Per-level constants for the hot segment-location path: counts, inverse
/// widths (multiplications instead of divisions) and the radial factor
/// rad = sqrt(3) h_d / 2, so that s = rad / r.
struct ConeLevelGeom {
  std::array<int, 3> n{};
  std::array<double, 3> inv_w{};
  double rad = 0.0;
};

ConeLevelGeom cone_level_geom(const ConeGridSpec& spec, int d, double h_d);

/// Linear gamma of the segment containing x in the box's cone grid;
/// component-wise floor against the segment widths. Throws if x lies inside
/// the neighbor zone (s > s_max), which signals a relevance-set bug.
std::uint64_t cone_of_point(const ConeGridSpec& spec, int d, Vec3 box_center, double h_d,
                            Vec3 x);

/// Cartesian tensor-product Chebyshev nodes of the segment, phi index
/// fastest; matches the value layout cheb_fit expects. Writes orders.total()
/// points. h_d is the side of the co-centered box.
void interpolation_nodes(const InterpOrders& orders, const ConeSegment& seg,
                         Vec3 box_center, double h_d, Vec3* out);

/// Sortable key realizing the total order: box Morton code first, then the
/// radial index, then elevation, then azimuth (gamma is packed that way).
inline std::pair<morton::code_t, std::uint64_t> cone_order_key(const ConeKey& key) {
  return {key.box, key.gamma};
}

inline constexpr std::uint32_t kNoCone = 0xffffffffu;

/// One level of relevant cone segments, sorted by the cone order; cones of a
/// box occupy a contiguous, gamma-sorted ordinal range.
struct LevelConeSet {
  int d = 0;
  std::array<int, 3> counts{};
  std::array<double, 3> widths{};
  std::vector<std::uint32_t> cone_box;      // cone ordinal -> box ordinal
  std::vector<std::uint64_t> cone_gamma;    // cone ordinal -> gamma
  std::vector<std::uint32_t> box_cone_begin;  // per box ordinal, size()+1

  std::size_t size() const { return cone_gamma.size(); }

  /// Ordinal of the cone with this gamma in the box's range, or kNoCone.
  /// Binary search over the contiguous range: average O(log per-box count)
  /// with no pointer chasing.
  std::uint32_t find(std::uint32_t box_ordinal, std::uint64_t gamma) const {
    std::uint32_t lo = box_cone_begin[box_ordinal];
    std::uint32_t hi = box_cone_begin[box_ordinal + 1];
    while (lo < hi) {
      const std::uint32_t mid = lo + (hi - lo) / 2;
      if (cone_gamma[mid] < gamma)
        lo = mid + 1;
      else
        hi = mid;
    }
    return (lo < box_cone_begin[box_ordinal + 1] && cone_gamma[lo] == gamma) ? lo
                                                                             : kNoCone;
  }
};

/// Relevant cone segments per level d = 3..D: a cone of box B is relevant if
/// it contains a cousin point of B, or an interpolation node of a relevant
/// parent-level cone of B's parent. Computed downward d = 3, 4, ..., D.
struct RelevantConeSet {
  ConeGridSpec spec;
  std::vector<LevelConeSet> levels;  // index d-3

  const LevelConeSet& level(int d) const { return levels[d - 3]; }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& l : levels) t += l.size();
    return t;
  }
};

RelevantConeSet compute_relevant_cones(const LinearOctree& tree, const PointCloud& sorted,
                                       const ConeGridSpec& spec);

}  // namespace ifgf
