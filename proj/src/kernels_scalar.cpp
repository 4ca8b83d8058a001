#include "qcorr/kernels.hpp"

#include <cmath>

namespace qcorr::kernels {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void negate_(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = -x[i];
}

void scale_(double* x, std::size_t n, double a) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void axpy_(double* acc, const double* x, std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += w * x[i];
}

void axpby_(double* s, const double* x, std::size_t n, double k1, double k2) {
  for (std::size_t i = 0; i < n; ++i) s[i] = k1 * x[i] + k2 * s[i];
}

void hadamard_pair_(double* a, double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = a[i];
    const double hi = b[i];
    a[i] = (lo + hi) * kInvSqrt2;
    b[i] = (lo - hi) * kInvSqrt2;
  }
}

double sumsq_block(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

// Pairwise recursion keeps the error O(eps * log n); a naive sweep over a
// 2^26-amplitude state would not resolve the 1e-12 norm invariant.
double sum_squares_(const double* x, std::size_t n) {
  if (n <= 512) return sumsq_block(x, n);
  const std::size_t half = (n / 2) & ~std::size_t{7};
  return sum_squares_(x, half) + sum_squares_(x + half, n - half);
}

void norm_accum_(double* out, const double* s, std::size_t n_complex) {
  for (std::size_t i = 0; i < n_complex; ++i) {
    const double re = s[2 * i];
    const double im = s[2 * i + 1];
    out[i] += re * re + im * im;
  }
}

}  // namespace

const Kernels& scalar() {
  static const Kernels k{"scalar",   negate_,      scale_,       axpy_,
                         axpby_,     hadamard_pair_, sum_squares_, norm_accum_};
  return k;
}

}  // namespace qcorr::kernels
