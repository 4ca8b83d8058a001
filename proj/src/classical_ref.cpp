#include "qcorr/classical_ref.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qcorr::classical {
namespace {

void check_equal_lengths(std::size_t a, std::size_t b, const char* who) {
  if (a != b) {
    throw std::invalid_argument(std::string(who) + ": length mismatch (" +
                                std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

void check_pow2(std::size_t n, const char* who) {
  if (n < 2 || !is_pow2(n)) {
    throw std::invalid_argument(std::string(who) +
                                ": length must be a power of two >= 2, got " +
                                std::to_string(n));
  }
}

}  // namespace

void fft_pow2(std::span<cxd> data, bool inverse) {
  const std::size_t n = data.size();
  check_pow2(n, "fft_pow2");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const double sign = inverse ? +1.0 : -1.0;
  std::vector<cxd> tw(n / 2);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi /
                       static_cast<double>(len);
    for (std::size_t k = 0; k < len / 2; ++k) {
      tw[k] = std::polar(1.0, ang * static_cast<double>(k));
    }
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cxd u = data[base + k];
        const cxd v = data[base + k + len / 2] * tw[k];
        data[base + k] = u + v;
        data[base + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (cxd& x : data) x *= inv_n;
  }
}

CorrelationResult crosscorr_brute(std::span<const double> a,
                                  std::span<const double> b, IndexForm form) {
  check_equal_lengths(a.size(), b.size(), "crosscorr_brute");
  const std::size_t n = a.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    if (form == IndexForm::a_shifted) {
      for (std::size_t i = 0; i < n; ++i) s += a[(j + i) % n] * b[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) s += a[i] * b[(j + i) % n];
    }
    out[j] = s;
  }
  return CorrelationResult{std::move(out), 0, CorrelationResult::Method::brute};
}

CorrelationResult crosscorr_fft(std::span<const double> a,
                                std::span<const double> b, IndexForm form) {
  check_equal_lengths(a.size(), b.size(), "crosscorr_fft");
  check_pow2(a.size(), "crosscorr_fft");
  const std::size_t n = a.size();
  std::vector<cxd> fa(a.begin(), a.end());
  std::vector<cxd> fb(b.begin(), b.end());
  fft_pow2(fa, false);
  fft_pow2(fb, false);
  // a_shifted: C = IDFT(A~ . conj(B~)); b_shifted swaps the roles.
  std::vector<cxd> prod(n);
  for (std::size_t k = 0; k < n; ++k) {
    prod[k] = form == IndexForm::a_shifted ? fa[k] * std::conj(fb[k])
                                           : fb[k] * std::conj(fa[k]);
  }
  fft_pow2(prod, true);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = prod[j].real();
  return CorrelationResult{std::move(out), 0, CorrelationResult::Method::fft};
}

std::vector<double> convolution(std::span<const double> a,
                                std::span<const double> b) {
  check_equal_lengths(a.size(), b.size(), "convolution");
  check_pow2(a.size(), "convolution");
  const std::size_t n = a.size();
  std::vector<cxd> fa(a.begin(), a.end());
  std::vector<cxd> fb(b.begin(), b.end());
  fft_pow2(fa, false);
  fft_pow2(fb, false);
  for (std::size_t k = 0; k < n; ++k) fa[k] *= fb[k];
  fft_pow2(fa, true);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = fa[j].real();
  return out;
}

CorrelationResult crosscorr2d_brute(std::span<const double> templ,
                                    std::span<const double> data, unsigned n) {
  const std::size_t count = std::size_t{n} * n;
  if (templ.size() != count || data.size() != count) {
    throw std::invalid_argument("crosscorr2d_brute: shape mismatch");
  }
  std::vector<double> out(count, 0.0);
  for (unsigned jb = 0; jb < n; ++jb) {
    for (unsigned kb = 0; kb < n; ++kb) {
      double s = 0.0;
      for (unsigned j = 0; j < n; ++j) {
        for (unsigned k = 0; k < n; ++k) {
          s += templ[j * n + k] * data[((j + jb) % n) * n + (k + kb) % n];
        }
      }
      out[jb * n + kb] = s;
    }
  }
  return CorrelationResult{std::move(out), n, CorrelationResult::Method::brute};
}

ProbArray2D emml_step(const ProbArray2D& templ, const ProbArray2D& data) {
  if (templ.side() != data.side()) {
    throw std::invalid_argument("emml_step: shape mismatch");
  }
  const unsigned n = templ.side();
  const CorrelationResult corr =
      crosscorr2d_brute(templ.values(), data.values(), n);
  std::vector<double> out(std::size_t{n} * n, 0.0);
  for (unsigned j = 0; j < n; ++j) {
    for (unsigned k = 0; k < n; ++k) {
      double s = 0.0;
      for (unsigned jb = 0; jb < n; ++jb) {
        for (unsigned kb = 0; kb < n; ++kb) {
          s += corr.values[jb * n + kb] *
               data.at((j + jb) % n, (k + kb) % n);
        }
      }
      out[j * n + k] = s;
    }
  }
  return ProbArray2D(std::move(out), n);
}

}  // namespace qcorr::classical
