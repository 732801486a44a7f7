#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ifgf/geometry.hpp"

using namespace ifgf;

TEST_CASE("sphere points satisfy |x| = a") {
  const PointCloud pc = generate_surface(Shape::Sphere, 1.0, 12, 42);
  CHECK(pc.size() == 6 * 12 * 12);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const double r2 = pc.x1[i] * pc.x1[i] + pc.x2[i] * pc.x2[i] + pc.x3[i] * pc.x3[i];
    CHECK(std::abs(r2 - 1.0) < 1e-12);
  }
}

TEST_CASE("oblate spheroid surface residual") {
  const PointCloud pc = generate_surface(Shape::OblateSpheroid, 1.0, 10, 1);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const double z = pc.x3[i] / 0.1;
    const double res = pc.x1[i] * pc.x1[i] + pc.x2[i] * pc.x2[i] + z * z - 1.0;
    CHECK(std::abs(res) < 1e-12);
  }
}

TEST_CASE("prolate spheroid diameter approaches 20a") {
  const double d30 = diameter(generate_surface(Shape::ProlateSpheroid, 1.0, 30, 1));
  const double d12 = diameter(generate_surface(Shape::ProlateSpheroid, 1.0, 12, 1));
  CHECK(d30 <= 20.0 + 1e-12);
  CHECK(d30 > d12);          // approaches from below as the sampling refines
  CHECK(d30 > 20.0 * 0.98);  // already close at n = 30
}

TEST_CASE("coefficients are seeded and inside the unit square") {
  const PointCloud a = generate_surface(Shape::Sphere, 1.0, 8, 9);
  const PointCloud b = generate_surface(Shape::Sphere, 1.0, 8, 9);
  const PointCloud c = generate_surface(Shape::Sphere, 1.0, 8, 10);
  CHECK(a.a_re == b.a_re);
  CHECK(a.a_im == b.a_im);
  CHECK(a.a_re != c.a_re);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.a_re[i] >= 0.0);
    CHECK(a.a_re[i] < 1.0);
    CHECK(a.a_im[i] >= 0.0);
    CHECK(a.a_im[i] < 1.0);
  }
}

TEST_CASE("generate_surface precondition errors") {
  CHECK_THROWS_AS(generate_surface(Shape::Sphere, 0.0, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_surface(Shape::Sphere, 1.0, 1, 1), std::invalid_argument);
}

TEST_CASE("bounding cube of a single point") {
  PointCloud pc;
  pc.resize(1);
  pc.x1[0] = 3.0; pc.x2[0] = -1.0; pc.x3[0] = 0.5;
  const BoundingCube cube = bounding_cube(pc);
  CHECK(cube.side == 1e-9);
  CHECK(pc.x1[0] >= cube.origin.x);
  CHECK(pc.x1[0] < cube.origin.x + cube.side);
}

TEST_CASE("bounding cube of two points on one axis") {
  PointCloud pc;
  pc.resize(2);
  pc.x1[1] = 1.0;
  const BoundingCube cube = bounding_cube(pc);
  CHECK(cube.side == doctest::Approx(1.0 + 1e-6).epsilon(1e-12));
}

TEST_CASE("bounding cube strictly contains every point") {
  const PointCloud pc = generate_surface(Shape::ProlateSpheroid, 1.0, 14, 2);
  const BoundingCube cube = bounding_cube(pc);
  CHECK(cube.side == doctest::Approx(2.0 * (1.0 + 1e-6) * 10.0).epsilon(1e-2));
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const Vec3 x = pc.point(i);
    CHECK(x.x >= cube.origin.x);
    CHECK(x.x < cube.origin.x + cube.side);
    CHECK(x.y >= cube.origin.y);
    CHECK(x.y < cube.origin.y + cube.side);
    CHECK(x.z >= cube.origin.z);
    CHECK(x.z < cube.origin.z + cube.side);
  }
}

TEST_CASE("diameter basics") {
  PointCloud one;
  one.resize(1);
  CHECK(diameter(one) == 0.0);
  const double ds = diameter(generate_surface(Shape::Sphere, 1.0, 20, 3));
  CHECK(ds == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("binary point file round trip") {
  const PointCloud pc = generate_surface(Shape::OblateSpheroid, 2.0, 7, 5);
  const auto path = std::filesystem::temp_directory_path() / "ifgf_pts_test.bin";
  write_points_binary(path, pc);
  const PointCloud back = read_points(path);
  REQUIRE(back.size() == pc.size());
  CHECK(back.x1 == pc.x1);
  CHECK(back.x2 == pc.x2);
  CHECK(back.x3 == pc.x3);
  CHECK(back.a_re == pc.a_re);
  CHECK(back.a_im == pc.a_im);
  std::filesystem::remove(path);
}

TEST_CASE("csv ingestion with and without header") {
  const auto path = std::filesystem::temp_directory_path() / "ifgf_pts_test.csv";
  {
    std::ofstream out(path);
    out << "x,y,z,a_re,a_im\n";
    out << "0.0,0.0,0.0,1.0,0.5\n";
    out << "1.0,2.0,3.0,-1.0,0.25\n";
  }
  const PointCloud pc = read_points(path);
  REQUIRE(pc.size() == 2);
  CHECK(pc.x3[1] == 3.0);
  CHECK(pc.a_im[1] == 0.25);
  {
    std::ofstream out(path);
    out << "0.0,0.0,0.0,1.0,0.5\n";
  }
  CHECK(read_points(path).size() == 1);
  std::filesystem::remove(path);
}

TEST_CASE("bad magic is rejected by the binary reader") {
  const auto path = std::filesystem::temp_directory_path() / "ifgf_bad.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPEnope";
  }
  CHECK_THROWS(read_points_binary(path));
  std::filesystem::remove(path);
}
