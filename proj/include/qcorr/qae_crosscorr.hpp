#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qcorr/encoding.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

enum class RunMode { exact, sampling };

// Smallest power of two >= x, never below floor.
unsigned next_pow2_at_least(double x, unsigned floor = 2);

struct CrossCorrConfig {
  unsigned n = 0;      // array length N (power of two)
  unsigned m = 0;      // readout dimension M; 0 derives it from alpha
  double alpha = 16.0; // M = smallest power of two >= alpha * sqrt(N)
  RunMode mode = RunMode::exact;
  std::uint64_t shots = 4096;
  std::uint64_t seed = 0;

  // Validates and fills m; throws std::invalid_argument on bad settings.
  CrossCorrConfig resolved() const;
};

// One amplitude-estimation readout: the conditional distribution of the
// readout register given the variable register, its argmax m_hat and the
// derived estimate sin^2(pi * m_hat / M).
struct QAEOutcome {
  std::uint64_t j_bar = 0;
  ConditionalDistribution distribution;
  std::uint64_t m_hat = 0;
  double estimate = 0.0;
  double theta_hat = 0.0;
  double error_bound = 0.0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t sample_count = 0;  // sampling mode: shots landing in this bin
  bool low_coverage = false;       // sampling mode: fewer than 30 samples
};

// Registers var, A, B (log2 N qubits each) and cor (log2 M), in that order.
RegisterLayout build_layout(unsigned n, unsigned m);

// Loads A and B, puts the variable register into uniform superposition and
// the readout register into QFT|0> = uniform superposition.
StateVector initialize(const ProbArray& a, const ProbArray& b,
                       const RegisterLayout& layout);

// One amplitude-amplification iterate: phase flip of the marked states
// (j_A - j_B = j_var mod N) followed by the diffusion about the prepared
// product state on A,B. Eigenvalues e^{+-2i*theta_jbar} per variable slice
// with sin^2(theta_jbar) = C_jbar.
void grover_q(StateVector& st, const ProbArray& a, const ProbArray& b,
              IndexMask mask = {});

// Full pipeline: initialize, controlled powers of the Grover iterate over
// the readout register, inverse QFT, per-j_bar readout.
std::vector<QAEOutcome> run_crosscorr(const ProbArray& a, const ProbArray& b,
                                      const CrossCorrConfig& config);

// sin^2(pi * m / M); throws when m >= M.
double estimate_from_m(std::uint64_t m, std::uint64_t big_m);

// (M*theta/pi, M*(1 - theta/pi)) with theta = arcsin(sqrt(c)); the two
// readout values the exact distribution concentrates on.
std::pair<double, double> theoretical_peak(double c, std::uint64_t big_m);

// 2*pi*sqrt(c(1-c))/M + pi^2/M^2, the standard amplitude-estimation bound.
double qae_error_bound(double c, std::uint64_t big_m);

}  // namespace qcorr
