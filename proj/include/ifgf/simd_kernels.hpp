#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>

namespace ifgf::simd {

/// sin and cos together: Cody-Waite three-step reduction by pi/2 plus the
/// usual minimax polynomials, a couple of ulp for |x| up to ~1e8. Cheaper
/// and as deterministic as two libm calls; the AVX2 lanes use the same
/// coefficients.
inline void sincos_fast(double x, double& s, double& c) {
  const double q = std::nearbyint(x * 0.63661977236758134308);
  double r = x - q * 1.57079632673412561417e+00;
  r -= q * 6.07710050650619224932e-11;
  r -= q * 2.02226624879595063154e-21;
  const double r2 = r * r;

  double ps = 1.58962301576546568060e-10;
  ps = ps * r2 + -2.50507477628578072866e-8;
  ps = ps * r2 + 2.75573136213857245213e-6;
  ps = ps * r2 + -1.98412698295895385996e-4;
  ps = ps * r2 + 8.33333333332211858878e-3;
  ps = ps * r2 + -1.66666666666666307295e-1;
  const double sin_p = r + r * r2 * ps;

  double pc = -1.13585365213876817300e-11;
  pc = pc * r2 + 2.08757008419747316778e-9;
  pc = pc * r2 + -2.75573141792967388112e-7;
  pc = pc * r2 + 2.48015872888517179954e-5;
  pc = pc * r2 + -1.38888888888730564116e-3;
  pc = pc * r2 + 4.16666666666665929218e-2;
  const double cos_p = 1.0 - 0.5 * r2 + r2 * r2 * pc;

  const auto qi = static_cast<std::int64_t>(q);
  const double ss = (qi & 1) ? cos_p : sin_p;
  const double cc = (qi & 1) ? sin_p : cos_p;
  s = (qi & 2) ? -ss : ss;
  c = ((qi + 1) & 2) ? -cc : cc;
}

inline constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

/// Batched kernel sums over structure-of-arrays sources for one target.
/// Scalar reference implementations and SIMD variants share these
/// signatures; a variant is selected once per process and the per-interval
/// accumulation order is fixed, so runs are reproducible.
struct KernelOps {
  // out = sum over m in [i0, i1), m != skip, of a_m e^{i kappa r} / (4 pi r),
  // r = |t - x_m|.
  void (*green_sum)(const double* x1, const double* x2, const double* x3,
                    const double* a_re, const double* a_im, std::size_t i0,
                    std::size_t i1, std::size_t skip, double tx, double ty, double tz,
                    double kappa, double& out_re, double& out_im);

  // out = sum over m in [i0, i1) of a_m e^{i kappa (r - rc)} rc / r with
  // r = |t - x_m| and rc = |t - c|: the analytic-factor field at a node t
  // for sources inside the box centered at c.
  void (*factored_sum)(const double* x1, const double* x2, const double* x3,
                       const double* a_re, const double* a_im, std::size_t i0,
                       std::size_t i1, double tx, double ty, double tz, double cx,
                       double cy, double cz, double kappa, double& out_re,
                       double& out_im);

  const char* name;
};

enum class Variant { Scalar, Avx2 };

bool variant_available(Variant v);
const KernelOps& kernel_ops(Variant v);

/// Process-wide selection: IFGF_SIMD={auto,scalar,avx2}, default auto picks
/// the widest available variant.
const KernelOps& active_kernel_ops();
const char* active_variant_name();

}  // namespace ifgf::simd
