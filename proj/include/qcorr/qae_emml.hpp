#pragma once

#include <cstdint>
#include <vector>

#include "qcorr/encoding.hpp"
#include "qcorr/qae_crosscorr.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

struct EmmlConfig {
  unsigned n = 0;       // image side N (power of two)
  unsigned m = 0;       // readout dimension; 0 derives it from alpha
  double alpha = 16.0;  // M = smallest power of two >= alpha * N
  RunMode mode = RunMode::exact;
  std::uint64_t shots = 4096;
  std::uint64_t seed = 0;
  unsigned max_iterations = 1;
  double convergence_tol = 1e-9;
  unsigned threads = 0;  // 0 = hardware concurrency

  EmmlConfig resolved() const;
};

struct EmmlState {
  ProbArray2D template_array;  // per-pixel average of the data arrays
  std::vector<ProbArray2D> data;
  unsigned t = 0;
};

struct PixelEstimate {
  unsigned j = 0, k = 0;
  std::uint64_t theta = 0;  // measured/argmax readout outcome
  double value = 0.0;       // sin^2(pi * theta / M)
  double error_bound = 0.0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t sample_count = 0;
  bool low_coverage = false;
  ConditionalDistribution distribution;
};

// Convergence report row, one per (iteration, data array).
struct EmmlIterationRow {
  unsigned t = 0;
  std::size_t array_id = 0;
  double l_inf_change = 0.0;
  double sum_before_renorm = 0.0;
  std::uint64_t oracle_calls = 0;
};

struct EmmlRunResult {
  EmmlState state;
  std::vector<EmmlIterationRow> rows;
  std::vector<double> iteration_l_inf;  // one entry per executed iteration
  std::uint64_t total_oracle_calls = 0;
  bool converged = false;
};

// Registers templ, C1, C2 (2*log2 N qubits each) and new (log2 M), in that
// order; a 2D pixel (row, col) packs as row * N + col within a register.
RegisterLayout build_layout_2d(unsigned n, unsigned m);

// Template into templ, data into C1, cyclically shifted data into C2;
// the readout register stays |0>.
StateVector initialize_emml(const ProbArray2D& templ, const ProbArray2D& data,
                            unsigned j, unsigned k,
                            const RegisterLayout& layout);

// Amplitude-amplification iterate for the pixel update: phase flip where
// C1 - templ = C2 componentwise mod N (rows and columns), then diffusion
// about the prepared three-register product state. Eigenvalues
// e^{+-2i*theta} with sin^2(theta) = the updated pixel value.
void grover_g(StateVector& st, const ProbArray2D& templ,
              const ProbArray2D& data, unsigned j, unsigned k,
              IndexMask mask = {});

// One-pixel amplitude estimation: the full circuit for (j, k).
PixelEstimate estimate_pixel(const ProbArray2D& templ, const ProbArray2D& data,
                             unsigned j, unsigned k, const EmmlConfig& config);

// One EM round: estimates every pixel of every array, renormalizes each new
// array (estimation noise breaks exact self-normalization), then rebuilds
// the template as the per-pixel average. pixel_estimates, when non-null,
// receives the raw per-array pixel estimates (pre-renormalization).
EmmlState emml_iteration(
    const EmmlState& state, const EmmlConfig& config,
    std::vector<EmmlIterationRow>* rows = nullptr,
    std::vector<std::vector<PixelEstimate>>* pixel_estimates = nullptr);

// Template = average of the inputs, then iterate until max_iterations or
// until the largest per-pixel change drops below convergence_tol.
EmmlRunResult run_emml(std::vector<ProbArray2D> initial_data,
                       const EmmlConfig& config);

// Deterministic per-pixel RNG stream derivation for sampling mode.
std::uint64_t pixel_stream_seed(std::uint64_t seed, unsigned t,
                                std::size_t array_id, unsigned j, unsigned k);

}  // namespace qcorr
