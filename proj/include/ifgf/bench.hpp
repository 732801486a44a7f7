#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ifgf::bench {

struct ScalingMetrics {
  double speedup = 0.0;     // S = T0 / T
  double ideal = 0.0;       // Nc / Nc0
  double strong_eff = 0.0;  // S / ideal
  std::optional<double> weak_eff;  // T0 log N / (T log N0), weak mode only
};

/// Speedup and efficiency figures for a (T0, Nc0, N0) -> (T, Nc, N)
/// transition. Weak mode (N != N0) requires N/N0 = Nc/Nc0 and yields
/// weak_eff; otherwise only the strong quantities are produced.
ScalingMetrics metrics(double t0, double t, double nc0, double nc, double n0, double n);

/// FNV-1a over the raw bytes of both arrays; hex string. Used to compare
/// results for bitwise equality across thread and rank counts.
std::string checksum_hex(const std::vector<double>& re, const std::vector<double>& im);

}  // namespace ifgf::bench
