#include "qcorr/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace qcorr::kernels {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void negate_(double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vnegq_f64(vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] = -x[i];
}

void scale_(double* x, std::size_t n, double a) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
  for (; i < n; ++i) x[i] *= a;
}

void axpy_(double* acc, const double* x, std::size_t n, double w) {
  const float64x2_t vw = vdupq_n_f64(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), vw, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) acc[i] += w * x[i];
}

void axpby_(double* s, const double* x, std::size_t n, double k1, double k2) {
  const float64x2_t v1 = vdupq_n_f64(k1);
  const float64x2_t v2 = vdupq_n_f64(k2);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vs = vld1q_f64(s + i);
    const float64x2_t vx = vld1q_f64(x + i);
    vst1q_f64(s + i, vfmaq_f64(vmulq_f64(v2, vs), v1, vx));
  }
  for (; i < n; ++i) s[i] = k1 * x[i] + k2 * s[i];
}

void hadamard_pair_(double* a, double* b, std::size_t n) {
  const float64x2_t c = vdupq_n_f64(kInvSqrt2);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t lo = vld1q_f64(a + i);
    const float64x2_t hi = vld1q_f64(b + i);
    vst1q_f64(a + i, vmulq_f64(vaddq_f64(lo, hi), c));
    vst1q_f64(b + i, vmulq_f64(vsubq_f64(lo, hi), c));
  }
  for (; i < n; ++i) {
    const double lo = a[i];
    const double hi = b[i];
    a[i] = (lo + hi) * kInvSqrt2;
    b[i] = (lo - hi) * kInvSqrt2;
  }
}

double sumsq_block(const double* x, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t v0 = vld1q_f64(x + i);
    const float64x2_t v1 = vld1q_f64(x + i + 2);
    acc0 = vfmaq_f64(acc0, v0, v0);
    acc1 = vfmaq_f64(acc1, v1, v1);
  }
  const float64x2_t acc = vaddq_f64(acc0, acc1);
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

double sum_squares_(const double* x, std::size_t n) {
  if (n <= 512) return sumsq_block(x, n);
  const std::size_t half = (n / 2) & ~std::size_t{7};
  return sum_squares_(x, half) + sum_squares_(x + half, n - half);
}

void norm_accum_(double* out, const double* s, std::size_t n_complex) {
  std::size_t i = 0;
  for (; i + 2 <= n_complex; i += 2) {
    const float64x2_t v0 = vld1q_f64(s + 2 * i);      // re0 im0
    const float64x2_t v1 = vld1q_f64(s + 2 * i + 2);  // re1 im1
    const float64x2_t sq0 = vmulq_f64(v0, v0);
    const float64x2_t sq1 = vmulq_f64(v1, v1);
    const float64x2_t norms = vpaddq_f64(sq0, sq1);   // [n0, n1]
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(out + i), norms));
  }
  for (; i < n_complex; ++i) {
    const double re = s[2 * i];
    const double im = s[2 * i + 1];
    out[i] += re * re + im * im;
  }
}

}  // namespace

const Kernels* neon() {
  static const Kernels k{"neon",  negate_,        scale_,       axpy_,
                         axpby_,  hadamard_pair_, sum_squares_, norm_accum_};
  return &k;
}

}  // namespace qcorr::kernels

#else

namespace qcorr::kernels {
const Kernels* neon() { return nullptr; }
}  // namespace qcorr::kernels

#endif
