// AVX2+FMA variants of the batched kernel sums. Four targets' worth of
// sources per iteration, one lane each; the horizontal reduction order is
// fixed, so a given variant is reproducible run to run.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <numbers>

#include "ifgf/simd_kernels.hpp"

namespace ifgf::simd {

namespace {

constexpr double kQuarterInvPi = 1.0 / (4.0 * std::numbers::pi);

// sin/cos on all four lanes. Cody-Waite three-step reduction by pi/2 with
// FMA, then the usual minimax polynomials on [-pi/4, pi/4]; accurate to a
// couple of ulp for the |x| <~ 1e8 arguments the kernels produce.
inline void sincos4(__m256d x, __m256d& s, __m256d& c) {
  const __m256d two_over_pi = _mm256_set1_pd(0.63661977236758134308);
  const __m256d pio2_1 = _mm256_set1_pd(1.57079632673412561417e+00);
  const __m256d pio2_2 = _mm256_set1_pd(6.07710050650619224932e-11);
  const __m256d pio2_3 = _mm256_set1_pd(2.02226624879595063154e-21);

  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, two_over_pi),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, pio2_1, x);
  r = _mm256_fnmadd_pd(q, pio2_2, r);
  r = _mm256_fnmadd_pd(q, pio2_3, r);

  const __m256d r2 = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(1.58962301576546568060e-10);
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-2.50507477628578072866e-8));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(2.75573136213857245213e-6));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.98412698295895385996e-4));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(8.33333333332211858878e-3));
  ps = _mm256_fmadd_pd(ps, r2, _mm256_set1_pd(-1.66666666666666307295e-1));
  const __m256d sin_p = _mm256_fmadd_pd(_mm256_mul_pd(r, r2), ps, r);

  __m256d pc = _mm256_set1_pd(-1.13585365213876817300e-11);
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(2.08757008419747316778e-9));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-2.75573141792967388112e-7));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(2.48015872888517179954e-5));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(-1.38888888888730564116e-3));
  pc = _mm256_fmadd_pd(pc, r2, _mm256_set1_pd(4.16666666666665929218e-2));
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d cos_p =
      _mm256_fmadd_pd(_mm256_mul_pd(r2, r2), pc, _mm256_fnmadd_pd(r2, half, one));

  // Quadrant from the low bits of q via the 1.5*2^52 integer trick.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i qi = _mm256_castpd_si256(_mm256_add_pd(q, magic));
  const __m256i one_i = _mm256_set1_epi64x(1);
  const __m256i two_i = _mm256_set1_epi64x(2);
  const __m256i swap_i = _mm256_and_si256(qi, one_i);
  const __m256d swap =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(swap_i, one_i));
  const __m256d s_sel = _mm256_blendv_pd(sin_p, cos_p, swap);
  const __m256d c_sel = _mm256_blendv_pd(cos_p, sin_p, swap);
  const __m256i sin_sign = _mm256_slli_epi64(_mm256_and_si256(qi, two_i), 62);
  const __m256i cos_sign = _mm256_slli_epi64(
      _mm256_and_si256(_mm256_add_epi64(qi, one_i), two_i), 62);
  s = _mm256_xor_pd(s_sel, _mm256_castsi256_pd(sin_sign));
  c = _mm256_xor_pd(c_sel, _mm256_castsi256_pd(cos_sign));
}

inline double reduce4(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);  // (l0+l2, l1+l3)
  return _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
}

void green_sum_avx2(const double* x1, const double* x2, const double* x3,
                    const double* a_re, const double* a_im, std::size_t i0,
                    std::size_t i1, std::size_t skip, double tx, double ty, double tz,
                    double kappa, double& out_re, double& out_im) {
  const __m256d vtx = _mm256_set1_pd(tx);
  const __m256d vty = _mm256_set1_pd(ty);
  const __m256d vtz = _mm256_set1_pd(tz);
  const __m256d vk = _mm256_set1_pd(kappa);
  const __m256d vcoef = _mm256_set1_pd(kQuarterInvPi);
  const __m256d vone = _mm256_set1_pd(1.0);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();

  std::size_t m = i0;
  for (; m + 4 <= i1; m += 4) {
    const __m256d dx = _mm256_sub_pd(vtx, _mm256_loadu_pd(x1 + m));
    const __m256d dy = _mm256_sub_pd(vty, _mm256_loadu_pd(x2 + m));
    const __m256d dz = _mm256_sub_pd(vtz, _mm256_loadu_pd(x3 + m));
    __m256d r2 = _mm256_mul_pd(dx, dx);
    r2 = _mm256_fmadd_pd(dy, dy, r2);
    r2 = _mm256_fmadd_pd(dz, dz, r2);
    __m256d ar = _mm256_loadu_pd(a_re + m);
    __m256d ai = _mm256_loadu_pd(a_im + m);
    if (skip - m < 4) {  // unsigned wrap: only true when skip in [m, m+4)
      alignas(32) std::int64_t lane[4] = {0, 0, 0, 0};
      lane[skip - m] = -1;
      const __m256d mask =
          _mm256_castsi256_pd(_mm256_load_si256(reinterpret_cast<__m256i*>(lane)));
      ar = _mm256_andnot_pd(mask, ar);
      ai = _mm256_andnot_pd(mask, ai);
      r2 = _mm256_blendv_pd(r2, vone, mask);  // keep the lane finite
    }
    const __m256d r = _mm256_sqrt_pd(r2);
    const __m256d inv = _mm256_div_pd(vcoef, r);
    __m256d sn, cs;
    sincos4(_mm256_mul_pd(vk, r), sn, cs);
    const __m256d gr = _mm256_mul_pd(cs, inv);
    const __m256d gi = _mm256_mul_pd(sn, inv);
    acc_re = _mm256_fmadd_pd(ar, gr, acc_re);
    acc_re = _mm256_fnmadd_pd(ai, gi, acc_re);
    acc_im = _mm256_fmadd_pd(ar, gi, acc_im);
    acc_im = _mm256_fmadd_pd(ai, gr, acc_im);
  }

  double sr = reduce4(acc_re), si = reduce4(acc_im);
  for (; m < i1; ++m) {
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

void factored_sum_avx2(const double* x1, const double* x2, const double* x3,
                       const double* a_re, const double* a_im, std::size_t i0,
                       std::size_t i1, double tx, double ty, double tz, double cx,
                       double cy, double cz, double kappa, double& out_re,
                       double& out_im) {
  const double dcx = tx - cx, dcy = ty - cy, dcz = tz - cz;
  const double rc = std::sqrt(dcx * dcx + dcy * dcy + dcz * dcz);

  const __m256d vtx = _mm256_set1_pd(tx);
  const __m256d vty = _mm256_set1_pd(ty);
  const __m256d vtz = _mm256_set1_pd(tz);
  const __m256d vk = _mm256_set1_pd(kappa);
  const __m256d vrc = _mm256_set1_pd(rc);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();

  std::size_t m = i0;
  for (; m + 4 <= i1; m += 4) {
    const __m256d dx = _mm256_sub_pd(vtx, _mm256_loadu_pd(x1 + m));
    const __m256d dy = _mm256_sub_pd(vty, _mm256_loadu_pd(x2 + m));
    const __m256d dz = _mm256_sub_pd(vtz, _mm256_loadu_pd(x3 + m));
    __m256d r2 = _mm256_mul_pd(dx, dx);
    r2 = _mm256_fmadd_pd(dy, dy, r2);
    r2 = _mm256_fmadd_pd(dz, dz, r2);
    const __m256d r = _mm256_sqrt_pd(r2);
    const __m256d ratio = _mm256_div_pd(vrc, r);
    const __m256d ph = _mm256_mul_pd(vk, _mm256_sub_pd(r, vrc));
    __m256d sn, cs;
    sincos4(ph, sn, cs);
    const __m256d gr = _mm256_mul_pd(cs, ratio);
    const __m256d gi = _mm256_mul_pd(sn, ratio);
    const __m256d ar = _mm256_loadu_pd(a_re + m);
    const __m256d ai = _mm256_loadu_pd(a_im + m);
    acc_re = _mm256_fmadd_pd(ar, gr, acc_re);
    acc_re = _mm256_fnmadd_pd(ai, gi, acc_re);
    acc_im = _mm256_fmadd_pd(ar, gi, acc_im);
    acc_im = _mm256_fmadd_pd(ai, gr, acc_im);
  }

  double sr = reduce4(acc_re), si = reduce4(acc_im);
  for (; m < i1; ++m) {
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

const KernelOps& avx2_kernel_ops() {
  static const KernelOps ops = {green_sum_avx2, factored_sum_avx2, "avx2"};
  return ops;
}

}  // namespace ifgf::simd

#endif  // x86_64
