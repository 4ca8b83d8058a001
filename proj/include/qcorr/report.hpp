#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace qcorr::report {

// %.17g, enough digits to round-trip a double exactly.
std::string format_double(double v);
std::string current_timestamp();

struct Meta {
  std::string algorithm;
  unsigned n = 0;
  unsigned m = 0;
  double alpha = 0.0;
  std::string mode;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::string timestamp;  // volatile; serialized only with timings enabled
};

struct Row {
  std::uint64_t index = 0;
  double quantum_estimate = 0.0;
  double classical_value = 0.0;
  double abs_error = 0.0;
  double error_bound = 0.0;
  bool within_bound = false;
  std::uint64_t m_hat = 0;
  double peak_lo = 0.0;
  double peak_hi = 0.0;
  std::uint64_t oracle_calls = 0;
  bool low_coverage = false;
  bool has_raw = false;  // raw-scale columns present (non-degenerate inputs)
  double estimate_raw = 0.0;
  double classical_raw = 0.0;
};

struct Summary {
  double max_abs_error = 0.0;
  double fraction_within_bound = 0.0;
  std::uint64_t total_oracle_calls = 0;
  double wall_time_ms = 0.0;  // volatile; serialized only with timings
};

struct RunReport {
  Meta meta;
  std::vector<Row> rows;
  Summary summary;

  bool all_within_bound() const;
};

// One (iteration, array) block of an EMML run.
struct EmmlArrayBlock {
  unsigned t = 0;
  std::size_t array_id = 0;
  std::string array_name;
  double l_inf_change = 0.0;
  double sum_before_renorm = 0.0;
  std::uint64_t oracle_calls = 0;
  std::vector<Row> rows;  // one per pixel, index = j * N + k
};

struct EmmlReport {
  Meta meta;
  std::vector<EmmlArrayBlock> blocks;
  unsigned iterations_run = 0;
  bool converged = false;
  Summary summary;

  bool all_within_bound() const;
};

struct SweepRow {
  unsigned m = 0;
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
  double mean_error_bound = 0.0;
  std::uint64_t total_oracle_calls = 0;
  std::uint64_t calls_per_estimate = 0;   // M - 1
  double classical_fft_cost = 0.0;        // N * log2 N per correlation set
  double classical_emml_pixel_cost = 0.0; // N^2 * log2 N per pixel
};

struct SweepReport {
  Meta meta;
  std::vector<SweepRow> rows;
};

void write_json(const RunReport& r, std::ostream& out, bool with_timings);
void write_csv(const RunReport& r, std::ostream& out, bool with_timings);
void write_json(const EmmlReport& r, std::ostream& out, bool with_timings);
void write_csv(const EmmlReport& r, std::ostream& out, bool with_timings);
void write_json(const SweepReport& r, std::ostream& out, bool with_timings);
void write_csv(const SweepReport& r, std::ostream& out, bool with_timings);

}  // namespace qcorr::report
