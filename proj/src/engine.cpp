#include "ifgf/engine.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ifgf/parallel.hpp"
#include "ifgf/simd_kernels.hpp"

namespace ifgf {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Segment-local Clenshaw parameters of x in the cone grid of (center, h).
struct ConeLocation {
  std::uint64_t gamma = 0;
  double ts = 0, tt = 0, tp = 0;
};

ConeLocation locate_cone(const ConeLevelGeom& g, Vec3 center, Vec3 x) {
  const Vec3 dx = x - center;
  const double r = norm(dx);
  if (r == 0.0) throw std::domain_error("cone_coords: point at box center");
  const double s = g.rad / r;
  if (s > ConeGridSpec::kSMax * (1.0 + 1e-9))
    throw std::domain_error("cone_of_point: point inside the neighbor zone (s > s_max)");
  const double theta = std::acos(std::clamp(dx.z / r, -1.0, 1.0));
  double phi = std::atan2(dx.y, dx.x);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  if (phi >= 2.0 * std::numbers::pi) phi = 0.0;

  const double fs = s * g.inv_w[0], ft = theta * g.inv_w[1], fp = phi * g.inv_w[2];
  const int is = std::min(static_cast<int>(fs), g.n[0] - 1);
  const int it = std::min(static_cast<int>(ft), g.n[1] - 1);
  const int ip = std::min(static_cast<int>(fp), g.n[2] - 1);
  ConeLocation loc;
  loc.gamma = gamma_pack({is, it, ip}, g.n);
  loc.ts = 2.0 * (fs - is) - 1.0;
  loc.tt = 2.0 * (ft - it) - 1.0;
  loc.tp = 2.0 * (fp - ip) - 1.0;
  return loc;
}

}  // namespace

int choose_depth(std::size_t n, double cube_side, double kappa, const EngineParams& p) {
  int d;
  if (p.depth > 0) {
    d = p.depth;
  } else if (kappa > 0.0) {
    // Deepest level whose boxes still measure at least box_lambda
    // wavelengths, so H_D lands in [box_lambda, 2 box_lambda) wavelengths.
    // The small slack absorbs the bounding-cube inflation.
    const double lambda = 2.0 * std::numbers::pi / kappa;
    const double ratio = cube_side / (p.box_lambda * lambda);
    d = 1 + static_cast<int>(std::floor(std::log2(std::max(ratio, 1.0)) + 1e-4));
  } else {
    // No wavelength: stop refining near a target box population.
    const double boxes = static_cast<double>(n) / std::max(1, p.points_per_box);
    d = 1 + static_cast<int>(std::ceil(0.5 * std::log2(std::max(boxes, 1.0)) - 1e-9));
  }
  return std::clamp(d, 3, morton::kMaxLevel);
}

Problem Problem::build(const PointCloud& input, const KernelConfig& cfg,
                       const EngineParams& p) {
  if (input.size() < 1) throw std::invalid_argument("empty point cloud");
  if (!p.orders.valid()) throw std::invalid_argument("unsupported interpolation orders");

  Problem prob;
  prob.cube = bounding_cube(input);
  prob.depth = choose_depth(input.size(), prob.cube.side, cfg.kappa(), p);
  prob.cloud = input;
  prob.perm = morton::sort_points(prob.cloud, prob.cube, prob.depth);
  prob.tree = LinearOctree::build(prob.cloud, prob.cube, prob.depth);

  ConeGridSpec spec;
  spec.depth = prob.depth;
  spec.base_s = p.base_s;
  spec.base_theta = p.base_theta;
  spec.base_phi = p.base_phi;
  spec.orders = p.orders;
  prob.cones = compute_relevant_cones(prob.tree, prob.cloud, spec);
  return prob;
}

BlockTable BlockTable::all_of(const BlockStore& store, std::size_t cones) {
  BlockTable t;
  t.re.resize(cones);
  t.im.resize(cones);
  for (std::size_t q = 0; q < cones; ++q) {
    t.re[q] = store.block_re(static_cast<std::uint32_t>(q));
    t.im[q] = store.block_im(static_cast<std::uint32_t>(q));
  }
  return t;
}

void eval_level_d(const Problem& prob, const KernelConfig& cfg, std::uint32_t cone_begin,
                  std::uint32_t cone_end, int threads, BlockStore& out) {
  const int d = prob.depth;
  const OctreeLevel& lvl = prob.tree.level(d);
  const LevelConeSet& cs = prob.cones.level(d);
  const ConeGridSpec& spec = prob.cones.spec;
  const InterpOrders& orders = spec.orders;
  const int P = orders.total();
  const PointCloud& pc = prob.cloud;
  const double kappa = cfg.kappa();
  const auto& ops = simd::active_kernel_ops();

  parallel_for(cone_end - cone_begin, threads, [&](std::size_t w) {
    const auto q = static_cast<std::uint32_t>(cone_begin + w);
    const std::uint32_t b = cs.cone_box[q];
    const BoxRecord& box = lvl.boxes[b];
    const ConeSegment seg = cone_segment(spec, d, cs.cone_gamma[q]);

    std::array<Vec3, kMaxNodesPerSegment> nodes;
    std::array<double, kMaxNodesPerSegment> vre, vim;
    interpolation_nodes(orders, seg, box.center, lvl.h, nodes.data());
    for (int m = 0; m < P; ++m) {
      ops.factored_sum(pc.x1.data(), pc.x2.data(), pc.x3.data(), pc.a_re.data(),
                       pc.a_im.data(), box.first_point, box.first_point + box.point_count,
                       nodes[m].x, nodes[m].y, nodes[m].z, box.center.x, box.center.y,
                       box.center.z, kappa, vre[m], vim[m]);
    }
    cheb_fit(orders, vre.data(), vim.data(), out.block_re(q), out.block_im(q));
  });
}

void propagation_pass(const Problem& prob, const KernelConfig& cfg, int d,
                      const BlockTable& child, std::uint32_t pcone_begin,
                      std::uint32_t pcone_end, int threads, BlockStore& parent_out) {
  const OctreeLevel& plvl = prob.tree.level(d - 1);
  const OctreeLevel& clvl = prob.tree.level(d);
  const LevelConeSet& pcs = prob.cones.level(d - 1);
  const LevelConeSet& ccs = prob.cones.level(d);
  const ConeGridSpec& spec = prob.cones.spec;
  const InterpOrders& orders = spec.orders;
  const int P = orders.total();
  const ConeLevelGeom geom = cone_level_geom(spec, d, clvl.h);
  const double kappa = cfg.kappa();

  parallel_for(pcone_end - pcone_begin, threads, [&](std::size_t w) {
    const auto q = static_cast<std::uint32_t>(pcone_begin + w);
    const std::uint32_t pb = pcs.cone_box[q];
    const Vec3 pcenter = plvl.boxes[pb].center;
    const ConeSegment seg = cone_segment(spec, d - 1, pcs.cone_gamma[q]);

    std::array<Vec3, kMaxNodesPerSegment> nodes;
    std::array<double, kMaxNodesPerSegment> rp;  // node distance from pcenter
    std::array<double, kMaxNodesPerSegment> acc_re{}, acc_im{};
    interpolation_nodes(orders, seg, pcenter, plvl.h, nodes.data());
    for (int m = 0; m < P; ++m) rp[m] = norm(nodes[m] - pcenter);
    std::fill_n(acc_re.data(), P, 0.0);
    std::fill_n(acc_im.data(), P, 0.0);

    for (std::uint32_t cb = plvl.child_begin[pb]; cb < plvl.child_begin[pb + 1]; ++cb) {
      const Vec3 ccenter = clvl.boxes[cb].center;
      for (int m = 0; m < P; ++m) {
        const ConeLocation loc = locate_cone(geom, ccenter, nodes[m]);
        const std::uint32_t cq = ccs.find(cb, loc.gamma);
        if (cq == kNoCone)
          throw std::logic_error("propagation: node not covered by a relevant child cone");
        if (child.re[cq] == nullptr)
          throw std::logic_error("propagation: child block unavailable");
        const complexd val =
            cheb_eval(orders, child.re[cq], child.im[cq], loc.ts, loc.tt, loc.tp);
        // Re-centering ratio G(x, child) / G(x, parent) in factored form.
        const double rc = norm(nodes[m] - ccenter);
        const double ratio = rp[m] / rc;
        double sn, cn;
        simd::sincos_fast(kappa * (rc - rp[m]), sn, cn);
        const double tr = ratio * cn, ti = ratio * sn;
        acc_re[m] += val.real() * tr - val.imag() * ti;
        acc_im[m] += val.real() * ti + val.imag() * tr;
      }
    }
    cheb_fit(orders, acc_re.data(), acc_im.data(), parent_out.block_re(q),
             parent_out.block_im(q));
  });
}

void interpolation_pass(const Problem& prob, const KernelConfig& cfg, int d,
                        const BlockTable& blocks, std::size_t pt_begin,
                        std::size_t pt_end, int threads, std::vector<double>& i_re,
                        std::vector<double>& i_im) {
  const OctreeLevel& lvl = prob.tree.level(d);
  const LevelConeSet& cs = prob.cones.level(d);
  const ConeGridSpec& spec = prob.cones.spec;
  const InterpOrders& orders = spec.orders;
  const ConeLevelGeom geom = cone_level_geom(spec, d, lvl.h);
  const double kappa = cfg.kappa();
  constexpr double quarter_inv_pi = 1.0 / (4.0 * std::numbers::pi);

  parallel_for(pt_end - pt_begin, threads, [&](std::size_t w) {
    const auto i = static_cast<std::uint32_t>(pt_begin + w);
    const Vec3 x = prob.cloud.point(i);
    const std::uint32_t b = prob.tree.box_of_sorted_point(i, d);
    double acc_re = 0.0, acc_im = 0.0;
    for (std::uint32_t ci = lvl.cousin_off[b]; ci < lvl.cousin_off[b + 1]; ++ci) {
      const std::uint32_t cb = lvl.cousin[ci];
      const Vec3 center = lvl.boxes[cb].center;
      const ConeLocation loc = locate_cone(geom, center, x);
      const std::uint32_t q = cs.find(cb, loc.gamma);
      if (q == kNoCone)
        throw std::logic_error("interpolation: cousin point not covered by a relevant cone");
      if (blocks.re[q] == nullptr)
        throw std::logic_error("interpolation: block unavailable");
      const complexd val = cheb_eval(orders, blocks.re[q], blocks.im[q], loc.ts, loc.tt,
                                     loc.tp);
      // Centered factor G(x, box center).
      const double r = norm(x - center);
      const double inv = quarter_inv_pi / r;
      double sn, cn;
      simd::sincos_fast(kappa * r, sn, cn);
      const double gr = cn * inv, gi = sn * inv;
      acc_re += val.real() * gr - val.imag() * gi;
      acc_im += val.real() * gi + val.imag() * gr;
    }
    i_re[i] += acc_re;
    i_im[i] += acc_im;
  });
}

void singular_pass(const Problem& prob, const KernelConfig& cfg, std::size_t pt_begin,
                   std::size_t pt_end, int threads, std::vector<double>& i_re,
                   std::vector<double>& i_im) {
  const OctreeLevel& lvl = prob.tree.level(prob.depth);
  const PointCloud& pc = prob.cloud;
  const double kappa = cfg.kappa();
  const auto& ops = simd::active_kernel_ops();

  parallel_for(pt_end - pt_begin, threads, [&](std::size_t w) {
    const auto i = static_cast<std::uint32_t>(pt_begin + w);
    const Vec3 x = pc.point(i);
    const std::uint32_t b = prob.tree.box_of_sorted_point(i, prob.depth);
    double acc_re = 0.0, acc_im = 0.0;
    for (std::uint32_t ni = lvl.nbr_off[b]; ni < lvl.nbr_off[b + 1]; ++ni) {
      const BoxRecord& nb = lvl.boxes[lvl.nbr[ni]];
      double sr, si;
      ops.green_sum(pc.x1.data(), pc.x2.data(), pc.x3.data(), pc.a_re.data(),
                    pc.a_im.data(), nb.first_point, nb.first_point + nb.point_count, i,
                    x.x, x.y, x.z, kappa, sr, si);
      acc_re += sr;
      acc_im += si;
    }
    i_re[i] += acc_re;
    i_im[i] += acc_im;
  });
}

ApplyReport apply(PointCloud& pc, const KernelConfig& cfg, const EngineParams& p) {
  if (pc.size() < 2) throw std::invalid_argument("apply: need at least two points");
  const int threads = resolve_threads(p.threads);
  ApplyReport rep;
  const auto t_total = clock_type::now();

  auto t0 = clock_type::now();
  Problem prob = Problem::build(pc, cfg, p);
  const int depth = prob.depth;
  rep.seconds.setup = seconds_since(t0);

  std::fill(prob.cloud.i_re.begin(), prob.cloud.i_re.end(), 0.0);
  std::fill(prob.cloud.i_im.begin(), prob.cloud.i_im.end(), 0.0);

  t0 = clock_type::now();
  singular_pass(prob, cfg, 0, prob.cloud.size(), threads, prob.cloud.i_re,
                prob.cloud.i_im);
  rep.seconds.singular = seconds_since(t0);

  const int P = p.orders.total();
  BlockStore cur;
  cur.allocate(prob.cones.level(depth).size(), P);
  rep.peak_live_blocks = prob.cones.level(depth).size();

  t0 = clock_type::now();
  eval_level_d(prob, cfg, 0, static_cast<std::uint32_t>(prob.cones.level(depth).size()),
               threads, cur);
  rep.seconds.level_d = seconds_since(t0);

  for (int d = depth; d >= 3; --d) {
    const std::size_t n_cones = prob.cones.level(d).size();
    const BlockTable table = BlockTable::all_of(cur, n_cones);

    t0 = clock_type::now();
    interpolation_pass(prob, cfg, d, table, 0, prob.cloud.size(), threads,
                       prob.cloud.i_re, prob.cloud.i_im);
    rep.seconds.interpolation += seconds_since(t0);

    if (d > 3) {
      const std::size_t n_parent = prob.cones.level(d - 1).size();
      BlockStore parent;
      parent.allocate(n_parent, P);
      rep.peak_live_blocks = std::max(rep.peak_live_blocks, n_cones + n_parent);
      t0 = clock_type::now();
      propagation_pass(prob, cfg, d, table, 0, static_cast<std::uint32_t>(n_parent),
                       threads, parent);
      rep.seconds.propagation += seconds_since(t0);
      cur = std::move(parent);
    }
  }

  // Back to the caller's original point order.
  for (std::size_t i = 0; i < prob.cloud.size(); ++i) {
    pc.i_re[prob.perm[i]] = prob.cloud.i_re[i];
    pc.i_im[prob.perm[i]] = prob.cloud.i_im[i];
  }

  rep.depth = depth;
  rep.n = pc.size();
  rep.h_level_d = prob.tree.level(depth).h;
  for (int d = 3; d <= depth; ++d)
    rep.levels.push_back({d, prob.tree.level(d).size(), prob.cones.level(d).size()});
  rep.simd_variant = simd::active_variant_name();
  rep.seconds.total = seconds_since(t_total);
  return rep;
}

void direct_eval(PointCloud& pc, const KernelConfig& cfg, int threads) {
  if (pc.size() < 2) throw std::invalid_argument("direct_eval: need at least two points");
  const double kappa = cfg.kappa();
  const auto& ops = simd::active_kernel_ops();
  const std::size_t n = pc.size();
  parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
    double sr, si;
    ops.green_sum(pc.x1.data(), pc.x2.data(), pc.x3.data(), pc.a_re.data(),
                  pc.a_im.data(), 0, n, i, pc.x1[i], pc.x2[i], pc.x3[i], kappa, sr, si);
    pc.i_re[i] = sr;
    pc.i_im[i] = si;
  });
}

std::vector<std::uint32_t> sample_indices(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m > n) throw std::invalid_argument("sample_indices: m > n");
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  std::mt19937_64 rng(seed);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t k = j + static_cast<std::size_t>(rng() % (n - j));
    std::swap(idx[j], idx[k]);
  }
  idx.resize(m);
  return idx;
}

double error_at_indices(const PointCloud& pc, const KernelConfig& cfg,
                        std::span<const std::uint32_t> idx, int threads) {
  const double kappa = cfg.kappa();
  const auto& ops = simd::active_kernel_ops();
  const std::size_t n = pc.size();
  std::vector<double> dre(idx.size()), dim(idx.size());
  parallel_for(idx.size(), resolve_threads(threads), [&](std::size_t j) {
    const std::uint32_t i = idx[j];
    ops.green_sum(pc.x1.data(), pc.x2.data(), pc.x3.data(), pc.a_re.data(),
                  pc.a_im.data(), 0, n, i, pc.x1[i], pc.x2[i], pc.x3[i], kappa, dre[j],
                  dim[j]);
  });
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const std::uint32_t i = idx[j];
    const double er = dre[j] - pc.i_re[i];
    const double ei = dim[j] - pc.i_im[i];
    num += er * er + ei * ei;
    den += dre[j] * dre[j] + dim[j] * dim[j];
  }
  if (den == 0.0) throw std::domain_error("estimate_error: zero reference norm");
  return std::sqrt(num / den);
}

double estimate_error(const PointCloud& pc, const KernelConfig& cfg, std::size_t m,
                      std::uint64_t seed, int threads) {
  const auto idx = sample_indices(pc.size(), m, seed);
  return error_at_indices(pc, cfg, idx, threads);
}

}  // namespace ifgf
