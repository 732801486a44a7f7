#include "ifgf/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ifgf {

Shape shape_from_string(const std::string& s) {
  if (s == "sphere") return Shape::Sphere;
  if (s == "oblate") return Shape::OblateSpheroid;
  if (s == "prolate") return Shape::ProlateSpheroid;
  throw std::invalid_argument("unknown shape: " + s);
}

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Sphere: return "sphere";
    case Shape::OblateSpheroid: return "oblate";
    case Shape::ProlateSpheroid: return "prolate";
  }
  return "?";
}

double shape_diameter(Shape shape, double a) {
  switch (shape) {
    case Shape::Sphere: return 2.0 * a;
    case Shape::OblateSpheroid: return 2.0 * a;
    case Shape::ProlateSpheroid: return 20.0 * a;
  }
  return 0.0;
}

namespace {

// z-axis scale turning the unit sphere into the requested surface.
double axis_scale(Shape shape) {
  switch (shape) {
    case Shape::Sphere: return 1.0;
    case Shape::OblateSpheroid: return 0.1;
    case Shape::ProlateSpheroid: return 10.0;
  }
  return 1.0;
}

double uniform01(std::mt19937_64& rng) {
  // 53-bit draw; uniform_real_distribution is implementation-defined.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

PointCloud generate_surface(Shape shape, double a, int n_per_dim, std::uint64_t seed) {
  if (a <= 0.0) throw std::invalid_argument("generate_surface: a must be positive");
  if (n_per_dim < 2) throw std::invalid_argument("generate_surface: n_per_dim must be >= 2");

  const int n = n_per_dim;
  const double zs = axis_scale(shape);
  PointCloud pc;
  pc.resize(static_cast<std::size_t>(6) * n * n);

  std::size_t m = 0;
  for (int face = 0; face < 6; ++face) {
    const int axis = face / 2;
    const double sign = (face % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) {
      const double u = -1.0 + (2.0 * i + 1.0) / n;
      for (int j = 0; j < n; ++j) {
        const double v = -1.0 + (2.0 * j + 1.0) / n;
        double p[3];
        p[axis] = sign;
        p[(axis + 1) % 3] = u;
        p[(axis + 2) % 3] = v;
        const double inv = 1.0 / std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        pc.x1[m] = a * p[0] * inv;
        pc.x2[m] = a * p[1] * inv;
        pc.x3[m] = zs * a * p[2] * inv;
        ++m;
      }
    }
  }

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    pc.a_re[i] = uniform01(rng);
    pc.a_im[i] = uniform01(rng);
  }
  return pc;
}

BoundingCube bounding_cube(const PointCloud& pc) {
  if (pc.size() == 0) throw std::invalid_argument("bounding_cube: empty cloud");

  double lo[3] = {pc.x1[0], pc.x2[0], pc.x3[0]};
  double hi[3] = {pc.x1[0], pc.x2[0], pc.x3[0]};
  for (std::size_t i = 1; i < pc.size(); ++i) {
    lo[0] = std::min(lo[0], pc.x1[i]); hi[0] = std::max(hi[0], pc.x1[i]);
    lo[1] = std::min(lo[1], pc.x2[i]); hi[1] = std::max(hi[1], pc.x2[i]);
    lo[2] = std::min(lo[2], pc.x3[i]); hi[2] = std::max(hi[2], pc.x3[i]);
  }
  const double extent = std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  const double side = std::max((1.0 + 1e-6) * extent, 1e-9);

  BoundingCube cube;
  cube.side = side;
  cube.origin = {0.5 * (lo[0] + hi[0]) - 0.5 * side,
                 0.5 * (lo[1] + hi[1]) - 0.5 * side,
                 0.5 * (lo[2] + hi[2]) - 0.5 * side};
  return cube;
}

double diameter(const PointCloud& pc) {
  const std::size_t n = pc.size();
  if (n == 0) throw std::invalid_argument("diameter: empty cloud");
  if (n <= 10000) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = pc.x1[i] - pc.x1[j];
        const double dy = pc.x2[i] - pc.x2[j];
        const double dz = pc.x3[i] - pc.x3[j];
        best = std::max(best, dx * dx + dy * dy + dz * dz);
      }
    }
    return std::sqrt(best);
  }
  double lo[3] = {pc.x1[0], pc.x2[0], pc.x3[0]};
  double hi[3] = {pc.x1[0], pc.x2[0], pc.x3[0]};
  for (std::size_t i = 1; i < n; ++i) {
    lo[0] = std::min(lo[0], pc.x1[i]); hi[0] = std::max(hi[0], pc.x1[i]);
    lo[1] = std::min(lo[1], pc.x2[i]); hi[1] = std::max(hi[1], pc.x2[i]);
    lo[2] = std::min(lo[2], pc.x3[i]); hi[2] = std::max(hi[2], pc.x3[i]);
  }
  const double ex = hi[0] - lo[0], ey = hi[1] - lo[1], ez = hi[2] - lo[2];
  return std::sqrt(ex * ex + ey * ey + ez * ez);
}

namespace {
constexpr char kMagic[4] = {'I', 'F', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_points_binary(const std::filesystem::path& path, const PointCloud& pc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  const std::uint64_t n = pc.size();
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double xyz[3] = {pc.x1[i], pc.x2[i], pc.x3[i]};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double ab[2] = {pc.a_re[i], pc.a_im[i]};
    out.write(reinterpret_cast<const char*>(ab), sizeof(ab));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

PointCloud read_points_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not an IFGF point file: " + path.string());
  if (version != kVersion)
    throw std::runtime_error("unsupported point file version");

  PointCloud pc;
  pc.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double xyz[3];
    in.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
    pc.x1[i] = xyz[0]; pc.x2[i] = xyz[1]; pc.x3[i] = xyz[2];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double ab[2];
    in.read(reinterpret_cast<char*>(ab), sizeof(ab));
    pc.a_re[i] = ab[0]; pc.a_im[i] = ab[1];
  }
  if (!in) throw std::runtime_error("truncated point file: " + path.string());
  return pc;
}

PointCloud read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  PointCloud pc;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v[5];
    char c;
    std::istringstream ss(line);
    if (!(ss >> v[0] >> c >> v[1] >> c >> v[2] >> c >> v[3] >> c >> v[4])) {
      if (first) { first = false; continue; }  // optional header
      throw std::runtime_error("bad CSV line: " + line);
    }
    first = false;
    pc.x1.push_back(v[0]); pc.x2.push_back(v[1]); pc.x3.push_back(v[2]);
    pc.a_re.push_back(v[3]); pc.a_im.push_back(v[4]);
  }
  pc.i_re.assign(pc.size(), 0.0);
  pc.i_im.assign(pc.size(), 0.0);
  if (pc.size() == 0) throw std::runtime_error("empty CSV point file: " + path.string());
  return pc;
}

PointCloud read_points(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  if (std::memcmp(magic, kMagic, 4) == 0) return read_points_binary(path);
  return read_points_csv(path);
}

}  // namespace ifgf
