#include "ifgf/cones.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ifgf {

SphCoords cone_coords(Vec3 box_center, double h_d, Vec3 x) {
  const Vec3 dx = x - box_center;
  const double r = norm(dx);
  if (r == 0.0) throw std::domain_error("cone_coords: point at box center");
  SphCoords sc;
  sc.s = std::sqrt(3.0) * h_d / (2.0 * r);
  sc.theta = std::acos(std::clamp(dx.z / r, -1.0, 1.0));
  sc.phi = std::atan2(dx.y, dx.x);
  if (sc.phi < 0.0) sc.phi += 2.0 * std::numbers::pi;
  if (sc.phi >= 2.0 * std::numbers::pi) sc.phi = 0.0;
  return sc;
}

std::uint64_t gamma_pack(std::array<int, 3> idx, std::array<int, 3> counts) {
  return (static_cast<std::uint64_t>(idx[0]) * counts[1] + idx[1]) * counts[2] + idx[2];
}

std::array<int, 3> gamma_unpack(std::uint64_t gamma, std::array<int, 3> counts) {
  const int ip = static_cast<int>(gamma % counts[2]);
  gamma /= counts[2];
  const int it = static_cast<int>(gamma % counts[1]);
  const int is = static_cast<int>(gamma / counts[1]);
  return {is, it, ip};
}

ConeSegment cone_segment(const ConeGridSpec& spec, int d, std::uint64_t gamma) {
  const auto n = spec.counts(d);
  const auto w = spec.widths(d);
  const auto idx = gamma_unpack(gamma, n);
  return {idx[0] * w[0], (idx[0] + 1) * w[0],
          idx[1] * w[1], (idx[1] + 1) * w[1],
          idx[2] * w[2], (idx[2] + 1) * w[2]};
}

ConeLevelGeom cone_level_geom(const ConeGridSpec& spec, int d, double h_d) {
  ConeLevelGeom g;
  g.n = spec.counts(d);
  const auto w = spec.widths(d);
  g.inv_w = {1.0 / w[0], 1.0 / w[1], 1.0 / w[2]};
  g.rad = std::sqrt(3.0) * h_d / 2.0;
  return g;
}

std::uint64_t cone_of_point(const ConeGridSpec& spec, int d, Vec3 box_center, double h_d,
                            Vec3 x) {
  const SphCoords sc = cone_coords(box_center, h_d, x);
  if (sc.s > ConeGridSpec::kSMax * (1.0 + 1e-9))
    throw std::domain_error("cone_of_point: point inside the neighbor zone (s > s_max)");
  const auto n = spec.counts(d);
  const auto w = spec.widths(d);
  // Floor against the half-open widths; the topmost segment absorbs the
  // boundary values s = s_max, theta = pi, and rounding at phi -> 2 pi.
  const int is = std::min(static_cast<int>(sc.s / w[0]), n[0] - 1);
  const int it = std::min(static_cast<int>(sc.theta / w[1]), n[1] - 1);
  const int ip = std::min(static_cast<int>(sc.phi / w[2]), n[2] - 1);
  return gamma_pack({is, it, ip}, n);
}

void interpolation_nodes(const InterpOrders& orders, const ConeSegment& seg,
                         Vec3 box_center, double h_d, Vec3* out) {
  const double s_mid = 0.5 * (seg.s_lo + seg.s_hi), s_half = 0.5 * (seg.s_hi - seg.s_lo);
  const double t_mid = 0.5 * (seg.t_lo + seg.t_hi), t_half = 0.5 * (seg.t_hi - seg.t_lo);
  const double f_mid = 0.5 * (seg.p_lo + seg.p_hi), f_half = 0.5 * (seg.p_hi - seg.p_lo);
  const double rad = std::sqrt(3.0) * h_d / 2.0;
  std::size_t m = 0;
  for (int js = 0; js < orders.p_s; ++js) {
    const double s = s_mid + s_half * cheb_node(js, orders.p_s);
    const double r = rad / s;
    for (int jt = 0; jt < orders.p_theta; ++jt) {
      const double theta = t_mid + t_half * cheb_node(jt, orders.p_theta);
      const double st = std::sin(theta), ct = std::cos(theta);
      for (int jp = 0; jp < orders.p_phi; ++jp) {
        const double phi = f_mid + f_half * cheb_node(jp, orders.p_phi);
        out[m++] = {box_center.x + r * st * std::cos(phi),
                    box_center.y + r * st * std::sin(phi),
                    box_center.z + r * ct};
      }
    }
  }
}

RelevantConeSet compute_relevant_cones(const LinearOctree& tree, const PointCloud& pc,
                                       const ConeGridSpec& spec) {
  if (spec.depth != tree.depth())
    throw std::invalid_argument("compute_relevant_cones: spec depth mismatch");
  if (!spec.orders.valid())
    throw std::invalid_argument("compute_relevant_cones: unsupported orders");

  RelevantConeSet set;
  set.spec = spec;
  set.levels.resize(tree.depth() - 2);

  for (int d = 3; d <= tree.depth(); ++d) {
    const OctreeLevel& lvl = tree.level(d);
    LevelConeSet& out = set.levels[d - 3];
    out.d = d;
    out.counts = spec.counts(d);
    out.widths = spec.widths(d);
    out.box_cone_begin.assign(lvl.size() + 1, 0);

    const LevelConeSet* up = d > 3 ? &set.levels[d - 4] : nullptr;
    const OctreeLevel* upl = d > 3 ? &tree.level(d - 1) : nullptr;

    std::vector<std::uint64_t> gammas;
    std::vector<Vec3> nodes(spec.orders.total());

    for (std::uint32_t b = 0; b < lvl.size(); ++b) {
      gammas.clear();
      const Vec3 center = lvl.boxes[b].center;

      // Clause 1: cone segments holding cousin points of this box.
      for (std::uint32_t ci = lvl.cousin_off[b]; ci < lvl.cousin_off[b + 1]; ++ci) {
        const BoxRecord& cb = lvl.boxes[lvl.cousin[ci]];
        for (std::uint32_t p = cb.first_point; p < cb.first_point + cb.point_count; ++p)
          gammas.push_back(cone_of_point(spec, d, center, lvl.h, pc.point(p)));
      }

      // Clause 2: segments holding interpolation nodes of relevant
      // parent-level cones of this box's parent.
      if (up) {
        const std::uint32_t pb = lvl.parent[b];
        const Vec3 pcenter = upl->boxes[pb].center;
        for (std::uint32_t q = up->box_cone_begin[pb]; q < up->box_cone_begin[pb + 1]; ++q) {
          const ConeSegment seg = cone_segment(spec, d - 1, up->cone_gamma[q]);
          interpolation_nodes(spec.orders, seg, pcenter, upl->h, nodes.data());
          for (const Vec3& x : nodes)
            gammas.push_back(cone_of_point(spec, d, center, lvl.h, x));
        }
      }

      std::sort(gammas.begin(), gammas.end());
      gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());

      for (const std::uint64_t g : gammas) {
        out.cone_box.push_back(b);
        out.cone_gamma.push_back(g);
      }
      out.box_cone_begin[b + 1] = static_cast<std::uint32_t>(out.cone_gamma.size());
    }
  }
  return set;
}

}  // namespace ifgf
