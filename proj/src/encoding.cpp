#include "qcorr/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qcorr {
namespace {

constexpr double kSumTol = 1e-12;

double kahan_sum(std::span<const double> v) {
  double s = 0.0, c = 0.0;
  for (const double x : v) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

void check_prob_values(std::span<const double> v, const char* what) {
  for (const double x : v) {
    if (!(x >= 0.0)) {
      throw std::invalid_argument(std::string(what) +
                                  " contains a negative or non-finite value");
    }
  }
  const double sum = kahan_sum(v);
  if (std::abs(sum - 1.0) > kSumTol) {
    throw std::invalid_argument(std::string(what) + " sums to " +
                                std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

ProbArray::ProbArray(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2 || !is_pow2(values_.size())) {
    throw std::invalid_argument(
        "probability array length must be a power of two >= 2, got " +
        std::to_string(values_.size()));
  }
  check_prob_values(values_, "probability array");
}

ProbArray2D::ProbArray2D(std::vector<double> values, unsigned side)
    : values_(std::move(values)), side_(side) {
  if (side_ < 2 || !is_pow2(side_)) {
    throw std::invalid_argument(
        "probability matrix side must be a power of two >= 2, got " +
        std::to_string(side_));
  }
  if (values_.size() != std::size_t{side_} * side_) {
    throw std::invalid_argument("probability matrix has " +
                                std::to_string(values_.size()) +
                                " values, expected " +
                                std::to_string(std::size_t{side_} * side_));
  }
  check_prob_values(values_, "probability matrix");
}

namespace {

// Shared min-shift normalization over a flat value span.
std::pair<std::vector<double>, AffineParams> normalize_values(
    std::span<const double> values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    // Constant array: any valid (a, b) collapses it; report uniform.
    const double u = 1.0 / static_cast<double>(values.size());
    return {std::vector<double>(values.size(), u),
            AffineParams{1.0, 0.0, /*degenerate=*/true}};
  }
  std::vector<double> shifted(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    shifted[i] = values[i] - *lo;
  }
  const double sum = kahan_sum(shifted);
  for (double& x : shifted) x /= sum;
  return {std::move(shifted), AffineParams{1.0 / sum, -*lo, false}};
}

}  // namespace

std::pair<ProbArray, AffineParams> normalize(const RawArray& raw) {
  if (raw.is_2d()) {
    throw std::invalid_argument("normalize: expected a 1D array");
  }
  if (raw.values.size() < 2 || !is_pow2(raw.values.size())) {
    throw std::invalid_argument(
        "normalize: array length must be a power of two >= 2, got " +
        std::to_string(raw.values.size()));
  }
  auto [values, params] = normalize_values(raw.values);
  return {ProbArray(std::move(values)), params};
}

std::pair<ProbArray2D, AffineParams> normalize_2d(const RawArray& raw) {
  if (!raw.is_2d()) {
    throw std::invalid_argument("normalize_2d: expected an N x N array");
  }
  if (raw.side < 2 || !is_pow2(raw.side)) {
    throw std::invalid_argument(
        "normalize_2d: side must be a power of two >= 2, got " +
        std::to_string(raw.side));
  }
  if (raw.values.size() != std::size_t{raw.side} * raw.side) {
    throw std::invalid_argument("normalize_2d: value count does not match "
                                "the declared side");
  }
  auto [values, params] = normalize_values(raw.values);
  return {ProbArray2D(std::move(values), raw.side), params};
}

std::vector<double> denormalize_correlation(std::span<const double> c_norm,
                                            const AffineParams& params_a,
                                            const AffineParams& params_b) {
  if (params_a.degenerate || params_b.degenerate) {
    throw std::invalid_argument(
        "denormalize_correlation: degenerate normalization (constant raw "
        "input) cannot be inverted");
  }
  if (!(params_a.a > 0.0) || !(params_b.a > 0.0)) {
    throw std::invalid_argument("denormalize_correlation: zero scale");
  }
  const double n = static_cast<double>(c_norm.size());
  const double beta_a = params_a.a * params_a.b;
  const double beta_b = params_b.a * params_b.b;
  const double denom = params_a.a * params_b.a;
  std::vector<double> out(c_norm.size());
  for (std::size_t j = 0; j < c_norm.size(); ++j) {
    out[j] = (c_norm[j] - beta_a - beta_b + n * beta_a * beta_b) / denom;
  }
  return out;
}

std::vector<double> amplitudes_from(const ProbArray& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::sqrt(p[i]);
  return out;
}

std::vector<double> amplitudes_from(const ProbArray2D& p) {
  const auto v = p.values();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::sqrt(v[i]);
  return out;
}

ProbArray2D cyclic_shift_2d(const ProbArray2D& p, unsigned j, unsigned k) {
  const unsigned n = p.side();
  if (j >= n || k >= n) {
    throw std::invalid_argument("cyclic_shift_2d: shift (" +
                                std::to_string(j) + ", " + std::to_string(k) +
                                ") out of range for side " +
                                std::to_string(n));
  }
  std::vector<double> out(p.size());
  for (unsigned jb = 0; jb < n; ++jb) {
    for (unsigned kb = 0; kb < n; ++kb) {
      out[jb * n + kb] = p.at((j + jb) % n, (k + kb) % n);
    }
  }
  return ProbArray2D(std::move(out), n);
}

ComplexDecomposition complex_decompose(std::span<const cxd> a,
                                       std::span<const cxd> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("complex_decompose: length mismatch");
  }
  if (a.size() < 2 || !is_pow2(a.size())) {
    throw std::invalid_argument(
        "complex_decompose: length must be a power of two >= 2");
  }
  std::vector<double> re_a(a.size()), im_a(a.size()), re_b(b.size()),
      im_b(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    re_a[i] = a[i].real();
    im_a[i] = a[i].imag();
    re_b[i] = b[i].real();
    im_b[i] = b[i].imag();
  }
  ComplexDecomposition d;
  d.parts[0] = {re_a, re_b};
  d.parts[1] = {re_a, im_b};
  d.parts[2] = {im_a, re_b};
  d.parts[3] = {im_a, im_b};
  return d;
}

std::vector<cxd> ComplexDecomposition::recombine(std::span<const double> c_rr,
                                                 std::span<const double> c_ri,
                                                 std::span<const double> c_ir,
                                                 std::span<const double> c_ii) {
  if (c_rr.size() != c_ri.size() || c_rr.size() != c_ir.size() ||
      c_rr.size() != c_ii.size()) {
    throw std::invalid_argument("recombine: part length mismatch");
  }
  std::vector<cxd> out(c_rr.size());
  for (std::size_t j = 0; j < c_rr.size(); ++j) {
    out[j] = cxd{c_rr[j] + c_ii[j], c_ri[j] - c_ir[j]};
  }
  return out;
}

}  // namespace qcorr
