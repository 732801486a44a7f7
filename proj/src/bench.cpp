#include "ifgf/bench.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace ifgf::bench {

ScalingMetrics metrics(double t0, double t, double nc0, double nc, double n0, double n) {
  if (t0 <= 0 || t <= 0 || nc0 <= 0 || nc <= 0 || n0 <= 0 || n <= 0)
    throw std::invalid_argument("metrics: all inputs must be positive");
  ScalingMetrics m;
  m.speedup = t0 / t;
  m.ideal = nc / nc0;
  m.strong_eff = m.speedup / m.ideal;
  if (n != n0) {
    // Weak mode: cores must grow proportionally to the problem size.
    if (std::abs(n / n0 - nc / nc0) > 1e-9 * (nc / nc0))
      throw std::invalid_argument("metrics: weak scaling requires N/N0 = Nc/Nc0");
    m.weak_eff = (t0 * std::log(n)) / (t * std::log(n0));
  }
  return m;
}

std::string checksum_hex(const std::vector<double>& re, const std::vector<double>& im) {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](const std::vector<double>& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    const std::size_t bytes = v.size() * sizeof(double);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(re);
  mix(im);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ifgf::bench
