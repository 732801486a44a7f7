#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ifgf/vec3.hpp"

namespace ifgf {

/// Surface discretization points in structure-of-arrays layout, plus the
/// complex source coefficients and the complex result accumulators.
struct PointCloud {
  std::vector<double> x1, x2, x3;    // coordinates
  std::vector<double> a_re, a_im;    // source coefficients
  std::vector<double> i_re, i_im;    // operator output

  std::size_t size() const { return x1.size(); }
  Vec3 point(std::size_t i) const { return {x1[i], x2[i], x3[i]}; }

  void resize(std::size_t n) {
    x1.resize(n); x2.resize(n); x3.resize(n);
    a_re.resize(n); a_im.resize(n);
    i_re.assign(n, 0.0); i_im.assign(n, 0.0);
  }
};

/// Axis-aligned cube [origin, origin + side)^3 containing the whole cloud.
struct BoundingCube {
  Vec3 origin;
  double side = 0.0;  // H_1
};

enum class Shape { Sphere, OblateSpheroid, ProlateSpheroid };

Shape shape_from_string(const std::string& s);
const char* shape_name(Shape s);

/// Largest pairwise distance of the ideal surface: 2a for the sphere and the
/// oblate spheroid, 20a for the prolate spheroid.
double shape_diameter(Shape shape, double a);

/// Samples the surface through six cube-face patches with equispaced
/// parameters (cell-centered, so patch seams carry no duplicate points) and
/// draws source coefficients uniformly from the complex unit square.
/// Produces 6 * n_per_dim^2 points.
PointCloud generate_surface(Shape shape, double a, int n_per_dim, std::uint64_t seed);

/// Cube of side (1 + 1e-6) * max extent centered on the coordinate midrange;
/// the inflation keeps every point strictly below the upper faces. A single
/// point gets a tiny positive cube (side 1e-9).
BoundingCube bounding_cube(const PointCloud& pc);

/// Exact max pairwise distance for N <= 1e4, otherwise the diagonal of the
/// axis-aligned bounding box (an upper bound, used only for size reporting).
double diameter(const PointCloud& pc);

// Binary point format: little-endian "IFGF", u32 version=1, u64 N,
// then N*3 f64 coordinates (x,y,z per point), then N*2 f64 coefficients.
void write_points_binary(const std::filesystem::path& path, const PointCloud& pc);
PointCloud read_points_binary(const std::filesystem::path& path);

// CSV alternative: x,y,z,a_re,a_im per line, header optional.
PointCloud read_points_csv(const std::filesystem::path& path);

/// Reads either format, deciding by the magic bytes.
PointCloud read_points(const std::filesystem::path& path);

}  // namespace ifgf
