#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace qcorr {

using cxd = std::complex<double>;

bool is_pow2(std::uint64_t v);

// Raw (pre-normalization) input data; side == 0 means a flat length-N array,
// otherwise an N x N row-major matrix.
struct RawArray {
  std::vector<double> values;
  unsigned side = 0;

  bool is_2d() const { return side != 0; }
};

// Coefficients of the constraint-enforcing linear map x = a * (raw + b),
// with b = -min(raw) and a = 1 / sum(raw - min). `degenerate` marks a
// constant input, which carries no correlation structure and is mapped to
// the uniform array instead.
struct AffineParams {
  double a = 1.0;
  double b = 0.0;
  bool degenerate = false;
};

// Non-negative array summing to 1 within 1e-12; length a power of two >= 2.
class ProbArray {
 public:
  explicit ProbArray(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

// Non-negative N x N matrix (row-major) with total sum 1 within 1e-12.
class ProbArray2D {
 public:
  ProbArray2D(std::vector<double> values, unsigned side);

  unsigned side() const { return side_; }
  std::size_t size() const { return values_.size(); }
  double at(unsigned j, unsigned k) const { return values_[j * side_ + k]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
  unsigned side_ = 0;
};

std::pair<ProbArray, AffineParams> normalize(const RawArray& raw);
std::pair<ProbArray2D, AffineParams> normalize_2d(const RawArray& raw);

// Inverts the normalization on a circular cross-correlation of two
// normalized arrays: with x = alpha*x' + beta (alpha = a, beta = a*b),
//   C_raw_j = (C_norm_j - beta_A - beta_B + N*beta_A*beta_B) /
//             (alpha_A * alpha_B)
// using sum(A_norm) = sum(B_norm) = 1. Throws for degenerate or zero-scale
// parameters.
std::vector<double> denormalize_correlation(std::span<const double> c_norm,
                                            const AffineParams& params_a,
                                            const AffineParams& params_b);

// Component j = sqrt(x_j); unit L2 norm because the array sums to 1.
std::vector<double> amplitudes_from(const ProbArray& p);
std::vector<double> amplitudes_from(const ProbArray2D& p);

// output[(jb, kb)] = input[((j + jb) mod N, (k + kb) mod N)]; preserves the
// multiset of values. Requires 0 <= j, k < N.
ProbArray2D cyclic_shift_2d(const ProbArray2D& p, unsigned j, unsigned k);

// Splits a complex cross-correlation task into four real ones.
struct ComplexDecomposition {
  // (Re A, Re B), (Re A, Im B), (Im A, Re B), (Im A, Im B)
  std::array<std::pair<std::vector<double>, std::vector<double>>, 4> parts;

  // With each part correlated as C_j = sum_i p_i q_{(j+i) mod N}, the
  // complex correlation C_j = sum_i a_i^* b_{(j+i) mod N} recombines as
  // (C_rr + C_ii) + i (C_ri - C_ir).
  static std::vector<cxd> recombine(std::span<const double> c_rr,
                                    std::span<const double> c_ri,
                                    std::span<const double> c_ir,
                                    std::span<const double> c_ii);
};

ComplexDecomposition complex_decompose(std::span<const cxd> a,
                                       std::span<const cxd> b);

}  // namespace qcorr
