#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ifgf/cones.hpp"
#include "ifgf/kernel.hpp"

namespace ifgf {

struct EngineParams {
  int depth = 0;             // 0 = choose from box_lambda (kappa > 0) or density
  double box_lambda = 0.25;  // smallest admissible H_D in wavelengths
  int points_per_box = 64;   // density target when no wavelength exists
  int base_s = 1, base_theta = 2, base_phi = 4;
  InterpOrders orders;
  int threads = 1;
};

int choose_depth(std::size_t n, double cube_side, double kappa, const EngineParams& p);

struct StageSeconds {
  double setup = 0, singular = 0, level_d = 0, interpolation = 0, propagation = 0,
         total = 0;
};

struct LevelInfo {
  int d = 0;
  std::size_t boxes = 0;
  std::size_t cones = 0;
};

struct ApplyReport {
  StageSeconds seconds;
  int depth = 0;
  std::size_t n = 0;
  double h_level_d = 0.0;
  std::vector<LevelInfo> levels;       // d = 3..depth
  std::size_t peak_live_blocks = 0;    // max blocks alive at once (two levels)
  const char* simd_variant = "";
};

/// Sorted cloud plus the box and cone structures; shared by the in-process
/// engine and the rank-simulated driver.
struct Problem {
  PointCloud cloud;  // Morton-sorted
  std::vector<std::uint32_t> perm;
  BoundingCube cube;
  int depth = 0;
  LinearOctree tree;
  RelevantConeSet cones;

  static Problem build(const PointCloud& input, const KernelConfig& cfg,
                       const EngineParams& p);
};

/// Interpolant coefficients for one level, P reals per cone in each part.
struct BlockStore {
  int P = 0;
  std::vector<double> re, im;

  void allocate(std::size_t cones, int p) {
    P = p;
    re.assign(cones * static_cast<std::size_t>(p), 0.0);
    im.assign(cones * static_cast<std::size_t>(p), 0.0);
  }
  double* block_re(std::uint32_t q) { return re.data() + static_cast<std::size_t>(q) * P; }
  double* block_im(std::uint32_t q) { return im.data() + static_cast<std::size_t>(q) * P; }
  const double* block_re(std::uint32_t q) const {
    return re.data() + static_cast<std::size_t>(q) * P;
  }
  const double* block_im(std::uint32_t q) const {
    return im.data() + static_cast<std::size_t>(q) * P;
  }
};

/// Per-cone read access for one level; a null entry means the block is not
/// visible to the caller (reading it is an internal error).
struct BlockTable {
  std::vector<const double*> re, im;

  static BlockTable all_of(const BlockStore& store, std::size_t cones);
};

// The passes iterate contiguous work-item ranges and write disjoint slots;
// outputs are bitwise independent of the thread count.

/// Evaluates the factored field of each level-D cone's box at the cone's
/// interpolation nodes and fits the coefficient block.
void eval_level_d(const Problem& prob, const KernelConfig& cfg, std::uint32_t cone_begin,
                  std::uint32_t cone_end, int threads, BlockStore& out);

/// Builds level d-1 blocks from level d: for each parent cone, accumulates
/// the re-centered child interpolants at the parent's nodes, then fits.
void propagation_pass(const Problem& prob, const KernelConfig& cfg, int d,
                      const BlockTable& child, std::uint32_t pcone_begin,
                      std::uint32_t pcone_end, int threads, BlockStore& parent_out);

/// Adds every cousin-box contribution at level d into the result slot of
/// each surface point in [pt_begin, pt_end).
void interpolation_pass(const Problem& prob, const KernelConfig& cfg, int d,
                        const BlockTable& blocks, std::size_t pt_begin,
                        std::size_t pt_end, int threads, std::vector<double>& i_re,
                        std::vector<double>& i_im);

/// Direct pair sums between level-D neighbor boxes (self pairs excluded).
void singular_pass(const Problem& prob, const KernelConfig& cfg, std::size_t pt_begin,
                   std::size_t pt_end, int threads, std::vector<double>& i_re,
                   std::vector<double>& i_im);

/// Full accelerated operator application; results land in pc.i_re/i_im in
/// the caller's original point order.
ApplyReport apply(PointCloud& pc, const KernelConfig& cfg, const EngineParams& p);

/// Exact O(N^2) evaluation, the verification oracle.
void direct_eval(PointCloud& pc, const KernelConfig& cfg, int threads);

/// First m entries of a seeded random permutation of [0, n).
std::vector<std::uint32_t> sample_indices(std::size_t n, std::size_t m, std::uint64_t seed);

/// Relative L2 error of pc.i_* against direct sums at the given points.
double error_at_indices(const PointCloud& pc, const KernelConfig& cfg,
                        std::span<const std::uint32_t> idx, int threads);

/// Relative L2 error on m points drawn via a seeded permutation.
double estimate_error(const PointCloud& pc, const KernelConfig& cfg, std::size_t m,
                      std::uint64_t seed, int threads);

}  // namespace ifgf
