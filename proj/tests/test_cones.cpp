#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "ifgf/cones.hpp"

using namespace ifgf;

namespace {

struct BuiltCase {
  PointCloud pc;
  BoundingCube cube;
  LinearOctree tree;
  RelevantConeSet cones;
};

BuiltCase build_case(std::size_t n, int depth, std::uint64_t seed,
                     InterpOrders orders = {3, 5, 5}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  BuiltCase c;
  c.pc.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 v{g(rng), g(rng), g(rng)};
    v = (1.0 / norm(v)) * v;
    c.pc.x1[i] = v.x;
    c.pc.x2[i] = v.y;
    c.pc.x3[i] = v.z;
  }
  c.cube = bounding_cube(c.pc);
  morton::sort_points(c.pc, c.cube, depth);
  c.tree = LinearOctree::build(c.pc, c.cube, depth);
  ConeGridSpec spec;
  spec.depth = depth;
  spec.orders = orders;
  c.cones = compute_relevant_cones(c.tree, c.pc, spec);
  return c;
}

}  // namespace

TEST_CASE("cone_coords at the closest cousin distance") {
  const double h = 0.25;
  // Index offset two along +x: nearest point is at distance 3h/2.
  const SphCoords sc = cone_coords({0, 0, 0}, h, {1.5 * h, 0, 0});
  CHECK(sc.s == doctest::Approx(std::sqrt(3.0) / 3.0).epsilon(1e-15));
  CHECK(sc.s <= ConeGridSpec::kSMax * (1 + 1e-12));
  CHECK(sc.theta == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
  CHECK(sc.phi == 0.0);
}

TEST_CASE("s decreases toward infinity, halving with doubled distance") {
  const double h = 1.0;
  double prev = cone_coords({0, 0, 0}, h, {2, 1, -1}).s;
  for (int k = 1; k < 12; ++k) {
    const double scale = std::pow(2.0, k);
    const double s = cone_coords({0, 0, 0}, h, {2 * scale, scale, -scale}).s;
    CHECK(s == doctest::Approx(prev / 2).epsilon(1e-14));
    prev = s;
  }
  CHECK(prev < 1e-3);  // s -> 0
}

TEST_CASE("pole convention: +z axis means theta 0") {
  const SphCoords sc = cone_coords({1, 1, 1}, 0.5, {1, 1, 9});
  CHECK(sc.theta == 0.0);
  const SphCoords sb = cone_coords({1, 1, 1}, 0.5, {1, 1, -9});
  CHECK(sb.theta == doctest::Approx(std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("cone_coords rejects the box center") {
  CHECK_THROWS_AS(cone_coords({1, 2, 3}, 0.5, {1, 2, 3}), std::domain_error);
}

TEST_CASE("cone_of_point: segment lower corner maps to that segment") {
  ConeGridSpec spec;
  spec.depth = 4;
  const int d = 4;
  const auto n = spec.counts(d);
  const auto w = spec.widths(d);
  const double h = 0.5;
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const std::array<int, 3> idx = {static_cast<int>(rng() % n[0]),
                                    static_cast<int>(rng() % n[1]),
                                    static_cast<int>(rng() % n[2])};
    // The exact lower corner of segment idx (half-open: it belongs to idx).
    // Skip s-index 0: s = 0 means an infinitely distant point.
    if (idx[0] == 0) continue;
    const double s = idx[0] * w[0];
    const double theta = idx[1] * w[1];
    const double phi = idx[2] * w[2];
    const double r = std::sqrt(3.0) * h / (2.0 * s);
    const Vec3 x{r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi),
                 r * std::cos(theta)};
    const std::uint64_t gamma = cone_of_point(spec, d, {0, 0, 0}, h, x);
    const auto got = gamma_unpack(gamma, n);
    // theta = 0 collapses phi; allow the polar ambiguity there.
    CHECK(got[0] == idx[0]);
    CHECK(got[1] == idx[1]);
    if (idx[1] != 0) CHECK(got[2] == idx[2]);
  }
}

TEST_CASE("antipodal directions differ by half the azimuth count") {
  ConeGridSpec spec;
  spec.depth = 5;
  const int d = 5;
  const auto n = spec.counts(d);
  REQUIRE(n[2] % 2 == 0);
  const double h = 0.25;
  const Vec3 x{3.0, 1.2, 0.4};
  const Vec3 anti{-3.0, -1.2, 0.4};  // mirrored azimuth, same elevation band
  const auto g1 = gamma_unpack(cone_of_point(spec, d, {0, 0, 0}, h, x), n);
  const auto g2 = gamma_unpack(cone_of_point(spec, d, {0, 0, 0}, h, anti), n);
  CHECK((g1[2] + n[2] / 2) % n[2] == g2[2]);
}

TEST_CASE("points inside the neighbor zone are rejected") {
  ConeGridSpec spec;
  spec.depth = 3;
  const double h = 1.0;
  CHECK_THROWS_AS(cone_of_point(spec, 3, {0, 0, 0}, h, {1.2, 0, 0}), std::domain_error);
}

TEST_CASE("interpolation nodes: count, interiority, symmetry") {
  ConeGridSpec spec;
  spec.depth = 3;
  spec.orders = {3, 5, 5};
  CHECK(spec.orders.total() == 75);
  const ConeSegment seg = cone_segment(spec, 3, gamma_pack({0, 1, 2}, spec.counts(3)));
  std::vector<Vec3> nodes(75);
  const double h = 2.0;
  interpolation_nodes(spec.orders, seg, {0, 0, 0}, h, nodes.data());
  double smin = 1e300, smax = -1e300;
  for (const Vec3& x : nodes) {
    const SphCoords sc = cone_coords({0, 0, 0}, h, x);
    CHECK(sc.s > seg.s_lo);
    CHECK(sc.s < seg.s_hi);
    CHECK(sc.theta > seg.t_lo);
    CHECK(sc.theta < seg.t_hi);
    CHECK(sc.phi > seg.p_lo);
    CHECK(sc.phi < seg.p_hi);
    smin = std::min(smin, sc.s);
    smax = std::max(smax, sc.s);
  }
  // Chebyshev symmetry about the segment's s midpoint.
  CHECK(smin - seg.s_lo == doctest::Approx(seg.s_hi - smax).epsilon(1e-10));
}

TEST_CASE("cone order: the sorted list is strictly increasing") {
  const BuiltCase c = build_case(3000, 4, 42);
  for (const auto& lvl : c.cones.levels) {
    for (std::size_t q = 1; q < lvl.size(); ++q) {
      const auto a = std::make_pair(lvl.cone_box[q - 1], lvl.cone_gamma[q - 1]);
      const auto b = std::make_pair(lvl.cone_box[q], lvl.cone_gamma[q]);
      CHECK(a < b);  // box Morton ordinal first, then (s, theta, phi)
    }
  }
}

TEST_CASE("cone_order_key: azimuth decides within a box, box Morton across") {
  const ConeKey a{5, gamma_pack({1, 2, 3}, {2, 4, 8}), 4};
  const ConeKey b{5, gamma_pack({1, 2, 4}, {2, 4, 8}), 4};
  const ConeKey c{6, gamma_pack({0, 0, 0}, {2, 4, 8}), 4};
  CHECK(cone_order_key(a) < cone_order_key(b));
  CHECK(cone_order_key(b) < cone_order_key(c));
  // Sorting then deduplicating is idempotent under a total order.
  std::vector<std::pair<morton::code_t, std::uint64_t>> keys = {
      cone_order_key(b), cone_order_key(a), cone_order_key(c), cone_order_key(a)};
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  CHECK(keys.size() == 3);
  CHECK(std::is_sorted(keys.begin(), keys.end()));
}

TEST_CASE("a cone containing a cousin point is always relevant") {
  const BuiltCase c = build_case(2000, 4, 43);
  for (int d = 3; d <= 4; ++d) {
    const OctreeLevel& lvl = c.tree.level(d);
    const LevelConeSet& cs = c.cones.level(d);
    for (std::uint32_t b = 0; b < lvl.size(); ++b) {
      for (std::uint32_t ci = lvl.cousin_off[b]; ci < lvl.cousin_off[b + 1]; ++ci) {
        const BoxRecord& cb = lvl.boxes[lvl.cousin[ci]];
        for (std::uint32_t p = cb.first_point; p < cb.first_point + cb.point_count;
             ++p) {
          const std::uint64_t gamma = cone_of_point(c.cones.spec, d, lvl.boxes[b].center,
                                                    lvl.h, c.pc.point(p));
          CHECK(cs.find(b, gamma) != kNoCone);
        }
      }
    }
  }
}

TEST_CASE("propagation coverage: every parent node lands on a relevant child cone") {
  const BuiltCase c = build_case(2500, 5, 44);
  const ConeGridSpec& spec = c.cones.spec;
  for (int d = 4; d <= 5; ++d) {
    const OctreeLevel& plvl = c.tree.level(d - 1);
    const OctreeLevel& clvl = c.tree.level(d);
    const LevelConeSet& pcs = c.cones.level(d - 1);
    const LevelConeSet& ccs = c.cones.level(d);
    std::vector<Vec3> nodes(spec.orders.total());
    for (std::uint32_t q = 0; q < pcs.size(); ++q) {
      const std::uint32_t pb = pcs.cone_box[q];
      const ConeSegment seg = cone_segment(spec, d - 1, pcs.cone_gamma[q]);
      interpolation_nodes(spec.orders, seg, plvl.boxes[pb].center, plvl.h, nodes.data());
      for (std::uint32_t cb = plvl.child_begin[pb]; cb < plvl.child_begin[pb + 1]; ++cb) {
        for (const Vec3& x : nodes) {
          const std::uint64_t gamma =
              cone_of_point(spec, d, clvl.boxes[cb].center, clvl.h, x);
          CHECK(ccs.find(cb, gamma) != kNoCone);
        }
      }
    }
  }
}

TEST_CASE("mutually neighboring boxes leave every relevant-cone set empty") {
  // Points confined to a 2x2x2 corner of an oversized cube: at level 3 all
  // occupied boxes sit within Chebyshev distance one of each other, so the
  // cousin clause never fires and no parent cones exist either.
  PointCloud pc;
  pc.resize(50);
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(0.0, 0.49);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    pc.x1[i] = u(rng);
    pc.x2[i] = u(rng);
    pc.x3[i] = u(rng);
  }
  const BoundingCube cube{{0, 0, 0}, 1.0};
  morton::sort_points(pc, cube, 3);
  const LinearOctree tree = LinearOctree::build(pc, cube, 3);
  for (const morton::code_t c : tree.level(3).codes)
    CHECK(tree.cousins(c, 3).empty());
  ConeGridSpec spec;
  spec.depth = 3;
  const RelevantConeSet cones = compute_relevant_cones(tree, pc, spec);
  CHECK(cones.total() == 0);
}

TEST_CASE("per-level relevant cone counts stay of one magnitude on a sphere") {
  const BuiltCase c = build_case(20000, 6, 46);
  std::size_t lo = SIZE_MAX, hi = 0;
  for (int d = 4; d <= 6; ++d) {  // level 3 of a diameter-2 cloud is tiny
    const std::size_t n = c.cones.level(d).size();
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  CHECK(hi <= 6 * lo);
}
