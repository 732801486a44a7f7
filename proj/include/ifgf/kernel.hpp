#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>

#include "ifgf/vec3.hpp"

namespace ifgf {

using complexd = std::complex<double>;

enum class KernelKind { Helmholtz, Laplace };

/// Kernel selection. Laplace behaves identically to Helmholtz with kappa = 0.
struct KernelConfig {
  KernelKind kind = KernelKind::Helmholtz;
  double wavenumber = 0.0;  // radians per unit length, >= 0

  double kappa() const { return kind == KernelKind::Laplace ? 0.0 : wavenumber; }
  double wavelength() const {
    const double k = kappa();
    return k > 0.0 ? 2.0 * std::numbers::pi / k : 0.0;
  }
};

/// G(x, y) = e^{i kappa |x-y|} / (4 pi |x-y|). Purely real for kappa = 0.
inline complexd green(Vec3 x, Vec3 y, const KernelConfig& cfg) {
  const double r = norm(x - y);
  if (r == 0.0) throw std::domain_error("green: coincident points");
  const double inv = 1.0 / (4.0 * std::numbers::pi * r);
  const double kr = cfg.kappa() * r;
  return {std::cos(kr) * inv, std::sin(kr) * inv};
}

/// Smooth factor g(x, x') = G(x, x') / G(x, center). Recombining with the
/// centered factor G(x, center) recovers G(x, x') to machine rounding.
inline complexd analytic_factor(Vec3 x, Vec3 xp, Vec3 center, const KernelConfig& cfg) {
  return green(x, xp, cfg) / green(x, center, cfg);
}

/// Re-centering ratio G(x, child_center) / G(x, parent_center) used when an
/// interpolant fitted about a child box feeds one fitted about its parent.
inline complexd transfer_factor(Vec3 x, Vec3 child_center, Vec3 parent_center,
                                const KernelConfig& cfg) {
  return green(x, child_center, cfg) / green(x, parent_center, cfg);
}

}  // namespace ifgf
