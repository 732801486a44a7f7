#pragma once

#include <complex>
#include <span>

#include "ifgf/kernel.hpp"

namespace ifgf {

// Per-dimension order cap; keeps fit/eval scratch on the stack.
constexpr int kMaxOrder1D = 12;
constexpr int kMaxNodesPerSegment = kMaxOrder1D * kMaxOrder1D * kMaxOrder1D;

/// Tensor interpolation orders (radial-inverse, elevation, azimuth).
struct InterpOrders {
  int p_s = 3;
  int p_theta = 5;
  int p_phi = 5;

  int total() const { return p_s * p_theta * p_phi; }
  bool valid() const {
    return p_s >= 1 && p_theta >= 1 && p_phi >= 1 && p_s <= kMaxOrder1D &&
           p_theta <= kMaxOrder1D && p_phi <= kMaxOrder1D;
  }
};

/// j-th Chebyshev point of the first kind for order p, in (-1, 1); the open
/// family, so half-open segments never share nodes.
inline double cheb_node(int j, int p) {
  return std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * p));
}

/// View of one fitted coefficient block (length total()).
struct InterpolantBlock {
  std::span<const double> re;
  std::span<const double> im;
};

/// Chebyshev coefficients from values at the tensor nodes, via three
/// separable 1D transforms. Value layout: index (js * p_theta + jt) * p_phi
/// + jp, phi fastest. Coefficients use the same layout over (ks, kt, kp).
/// Throws on non-finite input.
void cheb_fit(const InterpOrders& p, const double* values_re, const double* values_im,
              double* coef_re, double* coef_im);

/// Clenshaw tensor evaluation at (ts, tt, tp), each mapped to [-1, 1] within
/// the segment. Allocation-free, fixed operation order.
complexd cheb_eval(const InterpOrders& p, const double* coef_re, const double* coef_im,
                   double ts, double tt, double tp);

}  // namespace ifgf
