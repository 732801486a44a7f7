#include <cmath>
#include <numbers>

#include "ifgf/simd_kernels.hpp"

namespace ifgf::simd {

namespace {

constexpr double kQuarterInvPi = 1.0 / (4.0 * std::numbers::pi);

void green_sum_scalar(const double* x1, const double* x2, const double* x3,
                      const double* a_re, const double* a_im, std::size_t i0,
                      std::size_t i1, std::size_t skip, double tx, double ty, double tz,
                      double kappa, double& out_re, double& out_im) {
  double sr = 0.0, si = 0.0;
  for (std::size_t m = i0; m < i1; ++m) {
    if (m == skip) continue;
    const double dx = tx - x1[m], dy = ty - x2[m], dz = tz - x3[m];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double inv = kQuarterInvPi / r;
    const double kr = kappa * r;
    const double gr = std::cos(kr) * inv;
    const double gi = std::sin(kr) * inv;
    sr += a_re[m] * gr - a_im[m] * gi;
    si += a_re[m] * gi + a_im[m] * gr;
  }
  out_re = sr;
  out_im = si;
}

void factored_sum_scalar(const double* x1, const double* x2, const double* x3,
                         const double* a_re, const double* a_im, std::size_t i0,
                         std::size_t i1, double tx, double ty, double tz, double cx,
                         double cy, double cz, double kappa, double& out_re,
                         double& out_im) {
  const double dcx = tx - cx, dcy = ty - cy, dcz = tz - cz;
  const double rc = std::sqrt(dcx * dcx + dcy * dcy + dcz * dcz);
  double sr = 0.0, si = 0.0;
  for (std::size_t m = i0; m < i1; ++m) {
    const double dx = tx - x1[m], dy = ty - x2[m], dz = tz - x3[m];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double ratio = rc / r;
    const double ph = kappa * (r - rc);
    const double gr = std::cos(ph) * ratio;
    const double gi = std::sin(ph) * ratio;
    sr += a_re[m] * gr - a_im[m] * gi;
    si += a_re[m] * gi + a_im[m] * gr;
  }
  out_re = sr;
  out_im = si;
}

}  // namespace

const KernelOps& scalar_kernel_ops() {
  static const KernelOps ops = {green_sum_scalar, factored_sum_scalar, "scalar"};
  return ops;
}

}  // namespace ifgf::simd
