#include "qcorr/qae_crosscorr.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qcorr {
namespace {

unsigned log2_exact(std::uint64_t v, const char* what) {
  if (!is_pow2(v)) {
    throw std::invalid_argument(std::string(what) +
                                " must be a power of two, got " +
                                std::to_string(v));
  }
  return static_cast<unsigned>(std::countr_zero(v));
}

void grover_q_impl(StateVector& st, std::span<const double> sqrt_a,
                   std::span<const double> sqrt_b, IndexMask mask) {
  st.reflect_difference_condition("A", "B", "var", /*parts=*/1, mask);
  const std::array<ProductFactor, 2> factors{
      ProductFactor::real("A", sqrt_a), ProductFactor::real("B", sqrt_b)};
  st.diffuse_about_product_state(factors, mask);
}

}  // namespace

unsigned next_pow2_at_least(double x, unsigned floor) {
  unsigned m = floor;
  while (static_cast<double>(m) < x) m *= 2;
  return m;
}

CrossCorrConfig CrossCorrConfig::resolved() const {
  CrossCorrConfig c = *this;
  if (c.n < 2 || !is_pow2(c.n)) {
    throw std::invalid_argument("N must be a power of two >= 2, got " +
                                std::to_string(c.n));
  }
  if (!(c.alpha > 0.0)) {
    throw std::invalid_argument("alpha must be positive");
  }
  if (c.m == 0) {
    c.m = next_pow2_at_least(c.alpha * std::sqrt(static_cast<double>(c.n)), 4);
  }
  if (c.m < 4 || !is_pow2(c.m)) {
    throw std::invalid_argument("M must be a power of two >= 4, got " +
                                std::to_string(c.m));
  }
  if (c.mode == RunMode::sampling && c.shots == 0) {
    throw std::invalid_argument("sampling mode needs shots >= 1");
  }
  return c;
}

RegisterLayout build_layout(unsigned n, unsigned m) {
  const unsigned log_n = log2_exact(n, "N");
  const unsigned log_m = log2_exact(m, "M");
  if (log_n == 0) throw std::invalid_argument("N must be >= 2");
  return RegisterLayout{
      {"var", log_n}, {"A", log_n}, {"B", log_n}, {"cor", log_m}};
}

StateVector initialize(const ProbArray& a, const ProbArray& b,
                       const RegisterLayout& layout) {
  const std::uint64_t n = layout.reg("A").dim();
  if (a.size() != n || b.size() != n) {
    throw std::invalid_argument(
        "array length does not match the layout's register dimension " +
        std::to_string(n));
  }
  StateVector st = StateVector::allocate(layout);
  st.inject_amplitudes("A", amplitudes_from(a));
  st.inject_amplitudes("B", amplitudes_from(b));
  st.apply_hadamard_all("var");
  st.apply_qft("cor");
  return st;
}

void grover_q(StateVector& st, const ProbArray& a, const ProbArray& b,
              IndexMask mask) {
  grover_q_impl(st, amplitudes_from(a), amplitudes_from(b), mask);
}

double estimate_from_m(std::uint64_t m, std::uint64_t big_m) {
  if (m >= big_m) {
    throw std::invalid_argument("readout value " + std::to_string(m) +
                                " out of range for M = " +
                                std::to_string(big_m));
  }
  const double s = std::sin(std::numbers::pi * static_cast<double>(m) /
                            static_cast<double>(big_m));
  return s * s;
}

std::pair<double, double> theoretical_peak(double c, std::uint64_t big_m) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::invalid_argument("correlation value outside [0, 1]");
  }
  const double theta = std::asin(std::sqrt(c));
  const double md = static_cast<double>(big_m);
  const double lo = md * theta / std::numbers::pi;
  return {lo, md - lo};
}

double qae_error_bound(double c, std::uint64_t big_m) {
  const double cc = std::clamp(c, 0.0, 1.0);
  const double md = static_cast<double>(big_m);
  return 2.0 * std::numbers::pi * std::sqrt(cc * (1.0 - cc)) / md +
         std::numbers::pi * std::numbers::pi / (md * md);
}

std::vector<QAEOutcome> run_crosscorr(const ProbArray& a, const ProbArray& b,
                                      const CrossCorrConfig& config) {
  const CrossCorrConfig cfg = config.resolved();
  if (a.size() != cfg.n || b.size() != cfg.n) {
    throw std::invalid_argument("arrays have length " +
                                std::to_string(a.size()) + "/" +
                                std::to_string(b.size()) +
                                " but the configuration says N = " +
                                std::to_string(cfg.n));
  }
  const RegisterLayout layout = build_layout(cfg.n, cfg.m);
  StateVector st = initialize(a, b, layout);

  const std::vector<double> sqrt_a = amplitudes_from(a);
  const std::vector<double> sqrt_b = amplitudes_from(b);
  const std::uint64_t calls =
      st.controlled_power("cor", [&](StateVector& s, IndexMask mask) {
        grover_q_impl(s, sqrt_a, sqrt_b, mask);
      });
  st.apply_qft("cor", /*inverse=*/true);

  const std::uint64_t n = cfg.n;
  const std::uint64_t m_dim = cfg.m;
  std::vector<QAEOutcome> out(n);

  if (cfg.mode == RunMode::exact) {
    const std::vector<double> table = st.joint_probability_table({"var", "cor"});
    for (std::uint64_t j = 0; j < n; ++j) {
      QAEOutcome& o = out[j];
      o.j_bar = j;
      auto row_begin = table.begin() + static_cast<std::ptrdiff_t>(j * m_dim);
      std::vector<double> probs(row_begin,
                                row_begin + static_cast<std::ptrdiff_t>(m_dim));
      double weight = 0.0;
      for (const double p : probs) weight += p;
      if (weight > 0.0) {
        for (double& p : probs) p /= weight;
      }
      o.distribution.given = {{"var", j}};
      o.distribution.target = "cor";
      o.distribution.probabilities = std::move(probs);
      o.distribution.total_weight = weight;
    }
  } else {
    const std::vector<std::uint64_t> samples =
        st.sample_measurement({"var", "cor"}, cfg.seed, cfg.shots);
    std::vector<std::uint64_t> counts(n * m_dim, 0);
    for (const std::uint64_t s : samples) ++counts[s];
    for (std::uint64_t j = 0; j < n; ++j) {
      QAEOutcome& o = out[j];
      o.j_bar = j;
      std::uint64_t bin_total = 0;
      std::vector<double> probs(m_dim, 0.0);
      for (std::uint64_t m = 0; m < m_dim; ++m) {
        bin_total += counts[j * m_dim + m];
      }
      if (bin_total > 0) {
        for (std::uint64_t m = 0; m < m_dim; ++m) {
          probs[m] = static_cast<double>(counts[j * m_dim + m]) /
                     static_cast<double>(bin_total);
        }
      }
      o.distribution.given = {{"var", j}};
      o.distribution.target = "cor";
      o.distribution.probabilities = std::move(probs);
      o.distribution.total_weight =
          static_cast<double>(bin_total) / static_cast<double>(cfg.shots);
      o.sample_count = bin_total;
      o.low_coverage = bin_total < 30;
    }
  }

  for (QAEOutcome& o : out) {
    o.m_hat = o.distribution.argmax();
    o.estimate = estimate_from_m(o.m_hat, m_dim);
    o.theta_hat = std::numbers::pi * static_cast<double>(o.m_hat) /
                  static_cast<double>(m_dim);
    o.error_bound = qae_error_bound(o.estimate, m_dim);
    o.oracle_calls = calls;
  }
  return out;
}

}  // namespace qcorr
