#include "qcorr/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qcorr::kernels {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Kernels* resolve() {
  if (const char* env = std::getenv("QCORR_KERNELS")) {
    const std::string_view want(env);
    if (want == "scalar") return &scalar();
    if (want == "avx2") {
      if (const Kernels* k = avx2()) return k;
      throw std::runtime_error(
          "QCORR_KERNELS=avx2 requested but AVX2+FMA is not available");
    }
    if (want == "neon") {
      if (const Kernels* k = neon()) return k;
      throw std::runtime_error(
          "QCORR_KERNELS=neon requested but NEON is not available");
    }
    if (!want.empty()) {
      throw std::runtime_error("unknown QCORR_KERNELS value '" +
                               std::string(want) +
                               "' (expected scalar, avx2 or neon)");
    }
  }
  if (const Kernels* k = avx2()) return k;
  if (const Kernels* k = neon()) return k;
  return &scalar();
}

}  // namespace

const Kernels& active() {
  static const Kernels* k = resolve();
  return *k;
}

}  // namespace qcorr::kernels
