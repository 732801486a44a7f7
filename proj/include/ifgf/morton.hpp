#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ifgf/geometry.hpp"

namespace ifgf::morton {

using code_t = std::uint64_t;

// Levels are 1-based: the level-d grid has 2^(d-1) boxes per dimension, so
// depth <= 21 keeps three 20-bit indices inside one 64-bit code.
constexpr int kMaxLevel = 21;

/// Bit-interleaved code of a zero-based grid index (x lowest bit plane, then
/// y, then z). Throws if a component is outside [0, 2^(d-1)).
code_t encode(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz, int level);

/// Inverse of encode.
std::array<std::uint32_t, 3> decode(code_t code, int level);

/// Grid index of a point at the given level, relative to the cube.
std::array<std::uint32_t, 3> grid_index(Vec3 x, const BoundingCube& cube, int level);

/// Stable-sorts every cloud array by the Morton code of each point's
/// containing level-`depth` box; points sharing a box keep their input order.
/// Returns the permutation: sorted position i holds input point perm[i].
std::vector<std::uint32_t> sort_points(PointCloud& pc, const BoundingCube& cube, int depth);

}  // namespace ifgf::morton
