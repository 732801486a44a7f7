#include "ifgf/interp.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace ifgf {

namespace {

// coeffs[k] = sum_j m[k*p + j] * values[j]; exact polynomial reproduction at
// the first-kind nodes.
struct Transform1D {
  int p = 0;
  std::array<double, kMaxOrder1D * kMaxOrder1D> m{};
};

const Transform1D& transform_1d(int p) {
  static std::array<Transform1D, kMaxOrder1D + 1> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int q = 1; q <= kMaxOrder1D; ++q) {
      Transform1D& t = cache[q];
      t.p = q;
      for (int k = 0; k < q; ++k) {
        const double w = (k == 0 ? 1.0 : 2.0) / q;
        for (int j = 0; j < q; ++j)
          t.m[k * q + j] = w * std::cos(k * std::numbers::pi * (2.0 * j + 1.0) / (2.0 * q));
      }
    }
  });
  return cache[p];
}

// Applies the order-p transform along the axis with stride `stride`, for
// `count` pencils whose starts are ia*outer + ib (ia < na, ib < nb).
void apply_axis(const Transform1D& t, int p, int stride, int na, int outer, int nb,
                const double* in, double* out) {
  for (int ia = 0; ia < na; ++ia) {
    for (int ib = 0; ib < nb; ++ib) {
      const double* src = in + ia * outer + ib;
      double* dst = out + ia * outer + ib;
      for (int k = 0; k < p; ++k) {
        double acc = 0.0;
        const double* row = &t.m[k * p];
        for (int j = 0; j < p; ++j) acc += row[j] * src[j * stride];
        dst[k * stride] = acc;
      }
    }
  }
}

inline double clenshaw(const double* c, int n, double t) {
  if (n == 1) return c[0];
  double b1 = c[n - 1], b2 = 0.0;
  const double t2 = 2.0 * t;
  for (int k = n - 2; k >= 1; --k) {
    const double b = c[k] + t2 * b1 - b2;
    b2 = b1;
    b1 = b;
  }
  return c[0] + t * b1 - b2;
}

}  // namespace

void cheb_fit(const InterpOrders& p, const double* values_re, const double* values_im,
              double* coef_re, double* coef_im) {
  if (!p.valid()) throw std::invalid_argument("cheb_fit: unsupported orders");
  const int ps = p.p_s, pt = p.p_theta, pp = p.p_phi;
  const int total = p.total();
  for (int i = 0; i < total; ++i)
    if (!std::isfinite(values_re[i]) || !std::isfinite(values_im[i]))
      throw std::invalid_argument("cheb_fit: non-finite node value");

  std::array<double, kMaxNodesPerSegment> tmp;
  const Transform1D& ts = transform_1d(ps);
  const Transform1D& tt = transform_1d(pt);
  const Transform1D& tp = transform_1d(pp);

  const auto run = [&](const double* in, double* out) {
    // phi (stride 1), then theta (stride pp), then s (stride pt*pp).
    apply_axis(tp, pp, 1, ps * pt, pp, 1, in, tmp.data());
    apply_axis(tt, pt, pp, ps, pt * pp, pp, tmp.data(), out);
    for (int i = 0; i < total; ++i) tmp[i] = out[i];
    apply_axis(ts, ps, pt * pp, 1, total, pt * pp, tmp.data(), out);
  };
  run(values_re, coef_re);
  run(values_im, coef_im);
}

complexd cheb_eval(const InterpOrders& p, const double* coef_re, const double* coef_im,
                   double ts, double tt, double tp) {
  const int ps = p.p_s, pt = p.p_theta, pp = p.p_phi;
  double row_re[kMaxOrder1D] = {0}, row_im[kMaxOrder1D] = {0};
  double col_re[kMaxOrder1D] = {0}, col_im[kMaxOrder1D] = {0};
  for (int ks = 0; ks < ps; ++ks) {
    for (int kt = 0; kt < pt; ++kt) {
      const int base = (ks * pt + kt) * pp;
      row_re[kt] = clenshaw(coef_re + base, pp, tp);
      row_im[kt] = clenshaw(coef_im + base, pp, tp);
    }
    col_re[ks] = clenshaw(row_re, pt, tt);
    col_im[ks] = clenshaw(row_im, pt, tt);
  }
  return {clenshaw(col_re, ps, ts), clenshaw(col_im, ps, ts)};
}

}  // namespace ifgf
