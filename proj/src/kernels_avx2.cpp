#include "qcorr/kernels.hpp"

#if (defined(__x86_64__) || defined(_M_X64)) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace qcorr::kernels {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void negate_(double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_xor_pd(_mm256_loadu_pd(x + i), sign));
  }
  for (; i < n; ++i) x[i] = -x[i];
}

void scale_(double* x, std::size_t n, double a) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  }
  for (; i < n; ++i) x[i] *= a;
}

void axpy_(double* acc, const double* x, std::size_t n, double w) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(acc + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(vw, vx, va));
  }
  for (; i < n; ++i) acc[i] += w * x[i];
}

void axpby_(double* s, const double* x, std::size_t n, double k1, double k2) {
  const __m256d v1 = _mm256_set1_pd(k1);
  const __m256d v2 = _mm256_set1_pd(k2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vs = _mm256_loadu_pd(s + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(s + i, _mm256_fmadd_pd(v1, vx, _mm256_mul_pd(v2, vs)));
  }
  for (; i < n; ++i) s[i] = k1 * x[i] + k2 * s[i];
}

void hadamard_pair_(double* a, double* b, std::size_t n) {
  const __m256d c = _mm256_set1_pd(kInvSqrt2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lo = _mm256_loadu_pd(a + i);
    const __m256d hi = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_add_pd(lo, hi), c));
    _mm256_storeu_pd(b + i, _mm256_mul_pd(_mm256_sub_pd(lo, hi), c));
  }
  for (; i < n; ++i) {
    const double lo = a[i];
    const double hi = b[i];
    a[i] = (lo + hi) * kInvSqrt2;
    b[i] = (lo - hi) * kInvSqrt2;
  }
}

double sumsq_block(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(x + i);
    const __m256d v1 = _mm256_loadu_pd(x + i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
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
  for (; i + 4 <= n_complex; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(s + 2 * i);      // re0 im0 re1 im1
    const __m256d v1 = _mm256_loadu_pd(s + 2 * i + 4);  // re2 im2 re3 im3
    const __m256d sq0 = _mm256_mul_pd(v0, v0);
    const __m256d sq1 = _mm256_mul_pd(v1, v1);
    // hadd -> [n0, n2, n1, n3]; permute back to [n0, n1, n2, n3]
    const __m256d h = _mm256_hadd_pd(sq0, sq1);
    const __m256d norms = _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), norms));
  }
  for (; i < n_complex; ++i) {
    const double re = s[2 * i];
    const double im = s[2 * i + 1];
    out[i] += re * re + im * im;
  }
}

}  // namespace

const Kernels* avx2() {
  if (!avx2_available()) return nullptr;
  static const Kernels k{"avx2",  negate_,        scale_,        axpy_,
                         axpby_,  hadamard_pair_, sum_squares_,  norm_accum_};
  return &k;
}

}  // namespace qcorr::kernels

#else

namespace qcorr::kernels {
const Kernels* avx2() { return nullptr; }
}  // namespace qcorr::kernels

#endif
