#include <doctest.h>

#include <array>
#include <random>

#include "ifgf/cones.hpp"
#include "ifgf/interp.hpp"

using namespace ifgf;

namespace {

// Values of a separable polynomial with per-dimension degree < p at the
// tensor Chebyshev nodes (phi fastest), plus an evaluator for test points.
struct TestPoly {
  std::vector<double> cs, ct, cp;  // monomial coefficients per dimension

  static TestPoly random(const InterpOrders& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TestPoly tp;
    for (int i = 0; i < p.p_s; ++i) tp.cs.push_back(u(rng));
    for (int i = 0; i < p.p_theta; ++i) tp.ct.push_back(u(rng));
    for (int i = 0; i < p.p_phi; ++i) tp.cp.push_back(u(rng));
    return tp;
  }
  static double horner(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
    return acc;
  }
  double at(double ts, double tt, double tp) const {
    return horner(cs, ts) * horner(ct, tt) * horner(cp, tp);
  }
};

}  // namespace

TEST_CASE("constant field gives a lone leading coefficient") {
  const InterpOrders p{3, 5, 5};
  std::vector<double> vre(p.total(), 2.5), vim(p.total(), -0.75);
  std::vector<double> cre(p.total()), cim(p.total());
  cheb_fit(p, vre.data(), vim.data(), cre.data(), cim.data());
  CHECK(cre[0] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(cim[0] == doctest::Approx(-0.75).epsilon(1e-15));
  for (int i = 1; i < p.total(); ++i) {
    CHECK(std::abs(cre[i]) < 1e-14);
    CHECK(std::abs(cim[i]) < 1e-14);
  }
  const complexd v = cheb_eval(p, cre.data(), cim.data(), 0.3, -0.9, 0.123);
  CHECK(std::abs(v - complexd(2.5, -0.75)) < 1e-14);
}

TEST_CASE("polynomial exactness below the per-dimension degree") {
  std::mt19937_64 rng(21);
  const InterpOrders p{3, 5, 4};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const TestPoly poly = TestPoly::random(p, rng);
    std::vector<double> vre(p.total()), vim(p.total(), 0.0);
    std::size_t m = 0;
    for (int js = 0; js < p.p_s; ++js)
      for (int jt = 0; jt < p.p_theta; ++jt)
        for (int jp = 0; jp < p.p_phi; ++jp)
          vre[m++] = poly.at(cheb_node(js, p.p_s), cheb_node(jt, p.p_theta),
                             cheb_node(jp, p.p_phi));
    std::vector<double> cre(p.total()), cim(p.total());
    cheb_fit(p, vre.data(), vim.data(), cre.data(), cim.data());
    for (int k = 0; k < 25; ++k) {
      const double ts = u(rng), tt = u(rng), tp = u(rng);
      const complexd got = cheb_eval(p, cre.data(), cim.data(), ts, tt, tp);
      CHECK(got.real() == doctest::Approx(poly.at(ts, tt, tp)).epsilon(1e-12));
      CHECK(std::abs(got.imag()) < 1e-13);
    }
  }
}

TEST_CASE("linear-in-s data is reproduced exactly") {
  const InterpOrders p{2, 3, 3};
  std::vector<double> vre(p.total()), vim(p.total(), 0.0);
  std::size_t m = 0;
  for (int js = 0; js < p.p_s; ++js)
    for (int jt = 0; jt < p.p_theta; ++jt)
      for (int jp = 0; jp < p.p_phi; ++jp) vre[m++] = 3.0 * cheb_node(js, p.p_s) - 1.0;
  std::vector<double> cre(p.total()), cim(p.total());
  cheb_fit(p, vre.data(), vim.data(), cre.data(), cim.data());
  for (double ts : {-0.8, -0.2, 0.0, 0.5, 0.99})
    CHECK(cheb_eval(p, cre.data(), cim.data(), ts, 0.3, -0.7).real() ==
          doctest::Approx(3.0 * ts - 1.0).epsilon(1e-13));
}

TEST_CASE("fit reproduces node values to 1e-13 on random blocks") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const InterpOrders p{3, 5, 5};
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> vre(p.total()), vim(p.total());
    for (int i = 0; i < p.total(); ++i) {
      vre[i] = u(rng);
      vim[i] = u(rng);
    }
    std::vector<double> cre(p.total()), cim(p.total());
    cheb_fit(p, vre.data(), vim.data(), cre.data(), cim.data());
    std::size_t m = 0;
    for (int js = 0; js < p.p_s; ++js)
      for (int jt = 0; jt < p.p_theta; ++jt)
        for (int jp = 0; jp < p.p_phi; ++jp) {
          const complexd got = cheb_eval(p, cre.data(), cim.data(), cheb_node(js, p.p_s),
                                         cheb_node(jt, p.p_theta), cheb_node(jp, p.p_phi));
          worst = std::max(worst, std::abs(got - complexd(vre[m], vim[m])));
          ++m;
        }
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("fit rejects non-finite values") {
  const InterpOrders p{2, 2, 2};
  std::vector<double> vre(p.total(), 1.0), vim(p.total(), 0.0);
  vre[3] = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> cre(p.total()), cim(p.total());
  CHECK_THROWS_AS(cheb_fit(p, vre.data(), vim.data(), cre.data(), cim.data()),
                  std::invalid_argument);
}

// Single-segment accuracy of the factored-field interpolation at the sizes
// the depth rule actually produces (H_D in [lambda/4, lambda/2)). Measured
// worst cases: 4.9e-3 at H = lambda/4 and 1.6e-2 at lambda/2 for (3,5,5);
// the end-to-end relative L2 error sits well below these corner values.
TEST_CASE("analytic factor over a default-size segment fits to a few 1e-3") {
  const double h = 0.25;
  const KernelConfig cfg{KernelKind::Helmholtz, 2.0 * std::numbers::pi};  // lambda = 1
  ConeGridSpec spec;
  spec.depth = 3;  // counts at the finest level equal the base counts
  spec.orders = {3, 5, 5};
  const Vec3 center{0, 0, 0};

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const Vec3 src{h * u(rng), h * u(rng), h * u(rng)};
    // Random segment of the level-3 grid.
    const auto n = spec.counts(3);
    const std::uint64_t gamma = gamma_pack(
        {static_cast<int>(rng() % n[0]), static_cast<int>(rng() % n[1]),
         static_cast<int>(rng() % n[2])},
        n);
    const ConeSegment seg = cone_segment(spec, 3, gamma);
    std::vector<Vec3> nodes(spec.orders.total());
    interpolation_nodes(spec.orders, seg, center, h, nodes.data());
    std::vector<double> vre(spec.orders.total()), vim(spec.orders.total());
    for (int i = 0; i < spec.orders.total(); ++i) {
      const complexd g = analytic_factor(nodes[i], src, center, cfg);
      vre[i] = g.real();
      vim[i] = g.imag();
    }
    std::vector<double> cre(spec.orders.total()), cim(spec.orders.total());
    cheb_fit(spec.orders, vre.data(), vim.data(), cre.data(), cim.data());

    // Compare at random points inside the segment.
    for (int k = 0; k < 60; ++k) {
      const double s = seg.s_lo + (seg.s_hi - seg.s_lo) * (0.02 + 0.96 * (u(rng) + 0.5));
      const double th = seg.t_lo + (seg.t_hi - seg.t_lo) * (0.02 + 0.96 * (u(rng) + 0.5));
      const double ph = seg.p_lo + (seg.p_hi - seg.p_lo) * (0.02 + 0.96 * (u(rng) + 0.5));
      const double r = std::sqrt(3.0) * h / (2.0 * s);
      const Vec3 x{center.x + r * std::sin(th) * std::cos(ph),
                   center.y + r * std::sin(th) * std::sin(ph),
                   center.z + r * std::cos(th)};
      const double ts = 2.0 * (s - seg.s_lo) / (seg.s_hi - seg.s_lo) - 1.0;
      const double tt = 2.0 * (th - seg.t_lo) / (seg.t_hi - seg.t_lo) - 1.0;
      const double tp = 2.0 * (ph - seg.p_lo) / (seg.p_hi - seg.p_lo) - 1.0;
      const complexd got = cheb_eval(spec.orders, cre.data(), cim.data(), ts, tt, tp);
      const complexd want = analytic_factor(x, src, center, cfg);
      worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
  }
  CHECK(worst <= 6e-3);

  // Raising the orders to (5,7,7) buys an order of magnitude.
  spec.orders = {5, 7, 7};
  double worst_hi = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 src{h * u(rng), h * u(rng), h * u(rng)};
    const auto n = spec.counts(3);
    const std::uint64_t gamma = gamma_pack(
        {static_cast<int>(rng() % n[0]), static_cast<int>(rng() % n[1]),
         static_cast<int>(rng() % n[2])},
        n);
    const ConeSegment seg = cone_segment(spec, 3, gamma);
    std::vector<Vec3> nodes(spec.orders.total());
    interpolation_nodes(spec.orders, seg, center, h, nodes.data());
    std::vector<double> vre(spec.orders.total()), vim(spec.orders.total());
    for (int i = 0; i < spec.orders.total(); ++i) {
      const complexd g = analytic_factor(nodes[i], src, center, cfg);
      vre[i] = g.real();
      vim[i] = g.imag();
    }
    std::vector<double> cre(spec.orders.total()), cim(spec.orders.total());
    cheb_fit(spec.orders, vre.data(), vim.data(), cre.data(), cim.data());
    for (int k = 0; k < 60; ++k) {
      const double s = seg.s_lo + (seg.s_hi - seg.s_lo) * (0.02 + 0.96 * (u(rng) + 0.5));
      const double th = seg.t_lo + (seg.t_hi - seg.t_lo) * (0.02 + 0.96 * (u(rng) + 0.5));
      const double ph = seg.p_lo + (seg.p_hi - seg.p_lo) * (0.02 + 0.96 * (u(rng) + 0.5));
      const double r = std::sqrt(3.0) * h / (2.0 * s);
      const Vec3 x{center.x + r * std::sin(th) * std::cos(ph),
                   center.y + r * std::sin(th) * std::sin(ph),
                   center.z + r * std::cos(th)};
      const double ts = 2.0 * (s - seg.s_lo) / (seg.s_hi - seg.s_lo) - 1.0;
      const double tt = 2.0 * (th - seg.t_lo) / (seg.t_hi - seg.t_lo) - 1.0;
      const double tp = 2.0 * (ph - seg.p_lo) / (seg.p_hi - seg.p_lo) - 1.0;
      const complexd got = cheb_eval(spec.orders, cre.data(), cim.data(), ts, tt, tp);
      const complexd want = analytic_factor(x, src, center, cfg);
      worst_hi = std::max(worst_hi, std::abs(got - want) / std::abs(want));
    }
  }
  CHECK(worst_hi <= 5e-4);
  CHECK(worst_hi < worst);  // error decreases as the orders increase
}
