#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ifgf/simd_kernels.hpp"

namespace ifgf::simd {

const KernelOps& scalar_kernel_ops();
#if defined(__x86_64__) || defined(_M_X64)
const KernelOps& avx2_kernel_ops();
#endif

// TODO: NEON variant for aarch64; the scalar kernels are used there today.

bool variant_available(Variant v) {
  switch (v) {
    case Variant::Scalar:
      return true;
    case Variant::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelOps& kernel_ops(Variant v) {
  switch (v) {
    case Variant::Scalar:
      return scalar_kernel_ops();
    case Variant::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (variant_available(Variant::Avx2)) return avx2_kernel_ops();
#endif
      throw std::runtime_error("AVX2 kernels unavailable on this machine");
  }
  return scalar_kernel_ops();
}

namespace {

const KernelOps& select_active() {
  const char* env = std::getenv("IFGF_SIMD");
  const std::string want = env ? env : "auto";
  if (want == "scalar") return kernel_ops(Variant::Scalar);
  if (want == "avx2") return kernel_ops(Variant::Avx2);
  if (want != "auto") throw std::runtime_error("IFGF_SIMD must be auto, scalar, or avx2");
  if (variant_available(Variant::Avx2)) return kernel_ops(Variant::Avx2);
  return kernel_ops(Variant::Scalar);
}

}  // namespace

const KernelOps& active_kernel_ops() {
  static const KernelOps& ops = select_active();
  return ops;
}

const char* active_variant_name() { return active_kernel_ops().name; }

}  // namespace ifgf::simd
