#pragma once

#include <cstddef>

namespace qcorr::kernels {

// Elementwise kernels over double arrays. Complex amplitude vectors are
// processed as interleaved (re, im) doubles, so every kernel except
// norm_accum is elementwise in the doubles and `n` counts doubles.
//
// Scalar implementations are the reference semantics; the AVX2/NEON
// variants must agree elementwise to ~1 ulp (FMA contraction and lane-wise
// partial sums are the only permitted differences) and are checked against
// the scalar kernels by the test suite.
struct Kernels {
  const char* name;

  // x[i] = -x[i]
  void (*negate)(double* x, std::size_t n);
  // x[i] *= a
  void (*scale)(double* x, std::size_t n, double a);
  // acc[i] += w * x[i]
  void (*axpy)(double* acc, const double* x, std::size_t n, double w);
  // s[i] = k1 * x[i] + k2 * s[i]
  void (*axpby)(double* s, const double* x, std::size_t n, double k1, double k2);
  // (a[i], b[i]) <- ((a[i] + b[i]) / sqrt2, (a[i] - b[i]) / sqrt2)
  void (*hadamard_pair)(double* a, double* b, std::size_t n);
  // sum of x[i]^2, pairwise-recursive over >512-element blocks
  double (*sum_squares)(const double* x, std::size_t n);
  // out[i] += re_i^2 + im_i^2 for the n_complex interleaved pairs in s
  void (*norm_accum)(double* out, const double* s, std::size_t n_complex);
};

const Kernels& scalar();

// nullptr when the CPU (or the build target) lacks the instruction set.
const Kernels* avx2();
const Kernels* neon();

bool avx2_available();

// Runtime-selected backend: best available unless QCORR_KERNELS
// (scalar|avx2|neon) forces one. Resolved once per process.
const Kernels& active();

}  // namespace qcorr::kernels
