#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qcorr/encoding.hpp"

namespace qcorr::classical {

// Index convention of a circular cross-correlation. a_shifted is canonical
// here (it is the quantity the amplitude-estimation circuit computes); the
// two forms differ by index reflection for real inputs.
enum class IndexForm {
  a_shifted,  // C_j = sum_i A_{(j+i) mod N} * B_i
  b_shifted,  // C_j = sum_i A_i * B_{(j+i) mod N}
};

struct CorrelationResult {
  enum class Method { brute, fft };

  std::vector<double> values;
  unsigned side = 0;  // 0 for 1D results, N for an N x N matrix
  Method method = Method::brute;
};

// O(N^2) double loop; the ground truth everything else is checked against.
CorrelationResult crosscorr_brute(std::span<const double> a,
                                  std::span<const double> b,
                                  IndexForm form = IndexForm::a_shifted);

// Radix-2 transform, pointwise conjugate multiplication, inverse transform.
// Equals crosscorr_brute within 1e-10; requires power-of-two length.
CorrelationResult crosscorr_fft(std::span<const double> a,
                                std::span<const double> b,
                                IndexForm form = IndexForm::a_shifted);

// Circular convolution conv_j = sum_i a_i b_{(j-i) mod N}, via FFT.
std::vector<double> convolution(std::span<const double> a,
                                std::span<const double> b);

// C_{jb,kb} = sum_{j',k'} X_{j',k'} x_{(j'+jb) mod N, (k'+kb) mod N}; O(N^4).
CorrelationResult crosscorr2d_brute(std::span<const double> templ,
                                    std::span<const double> data, unsigned n);

// Exact translation-model update
//   out_{j,k} = sum_{jb,kb} C_{jb,kb} x_{(j+jb) mod N, (k+kb) mod N}
// with C = crosscorr2d_brute(templ, data). Self-normalizing: the output sums
// to 1 whenever template and data each do.
ProbArray2D emml_step(const ProbArray2D& templ, const ProbArray2D& data);

// In-place power-of-two FFT, engineering sign convention (forward kernel
// e^{-2*pi*i*jk/N}; inverse conjugated and scaled by 1/N).
void fft_pow2(std::span<cxd> data, bool inverse);

}  // namespace qcorr::classical
