#include "ifgf/morton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ifgf::morton {

namespace {

// Spreads the low 21 bits of x so bit k lands at position 3k.
inline std::uint64_t spread3(std::uint64_t x) {
  x &= 0x1fffff;
  x = (x | x << 32) & 0x1f00000000ffff;
  x = (x | x << 16) & 0x1f0000ff0000ff;
  x = (x | x << 8) & 0x100f00f00f00f00f;
  x = (x | x << 4) & 0x10c30c30c30c30c3;
  x = (x | x << 2) & 0x1249249249249249;
  return x;
}

inline std::uint32_t compact3(std::uint64_t x) {
  x &= 0x1249249249249249;
  x = (x ^ (x >> 2)) & 0x10c30c30c30c30c3;
  x = (x ^ (x >> 4)) & 0x100f00f00f00f00f;
  x = (x ^ (x >> 8)) & 0x1f0000ff0000ff;
  x = (x ^ (x >> 16)) & 0x1f00000000ffff;
  x = (x ^ (x >> 32)) & 0x1fffff;
  return static_cast<std::uint32_t>(x);
}

inline void check_level(int level) {
  if (level < 1 || level > kMaxLevel)
    throw std::invalid_argument("morton: level out of range");
}

}  // namespace

code_t encode(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz, int level) {
  check_level(level);
  const std::uint32_t n = 1u << (level - 1);
  if (ix >= n || iy >= n || iz >= n)
    throw std::invalid_argument("morton::encode: index out of range for level");
  return spread3(ix) | spread3(iy) << 1 | spread3(iz) << 2;
}

std::array<std::uint32_t, 3> decode(code_t code, int level) {
  check_level(level);
  return {compact3(code), compact3(code >> 1), compact3(code >> 2)};
}

std::array<std::uint32_t, 3> grid_index(Vec3 x, const BoundingCube& cube, int level) {
  check_level(level);
  const std::uint32_t n = 1u << (level - 1);
  const double h = cube.side / static_cast<double>(n);
  std::array<std::uint32_t, 3> out{};
  const double rel[3] = {x.x - cube.origin.x, x.y - cube.origin.y, x.z - cube.origin.z};
  for (int c = 0; c < 3; ++c) {
    if (rel[c] < 0.0 || rel[c] >= cube.side)
      throw std::domain_error("point outside bounding cube");
    auto idx = static_cast<std::int64_t>(std::floor(rel[c] / h));
    // A point an ulp below the upper face can round up to the grid edge.
    if (idx >= n) idx = n - 1;
    out[c] = static_cast<std::uint32_t>(idx);
  }
  return out;
}

std::vector<std::uint32_t> sort_points(PointCloud& pc, const BoundingCube& cube, int depth) {
  if (depth < 3) throw std::invalid_argument("sort_points: depth must be >= 3");
  check_level(depth);
  const std::size_t n = pc.size();

  std::vector<code_t> codes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = grid_index(pc.point(i), cube, depth);
    codes[i] = encode(k[0], k[1], k[2], depth);
  }

  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::stable_sort(perm.begin(), perm.end(),
                   [&codes](std::uint32_t a, std::uint32_t b) { return codes[a] < codes[b]; });

  const auto apply = [&perm, n](std::vector<double>& v) {
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = v[perm[i]];
    v.swap(tmp);
  };
  apply(pc.x1); apply(pc.x2); apply(pc.x3);
  apply(pc.a_re); apply(pc.a_im);
  apply(pc.i_re); apply(pc.i_im);
  return perm;
}

}  // namespace ifgf::morton
