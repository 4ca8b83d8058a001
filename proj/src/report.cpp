#include "qcorr/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace qcorr::report {
namespace {

// Tiny ordered JSON emitter; field order and number formatting are part of
// the byte-determinism contract for report files.
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& out) : out_(out) {}

  void begin_object() {
    separate();
    out_ << '{';
    first_ = true;
  }
  void end_object() {
    out_ << '}';
    first_ = false;
  }
  void begin_array() {
    separate();
    out_ << '[';
    first_ = true;
  }
  void end_array() {
    out_ << ']';
    first_ = false;
  }
  void key(const char* k) {
    separate();
    out_ << '"' << k << "\":";
    first_ = true;  // the upcoming value needs no comma
  }
  void value(const std::string& v) {
    separate();
    out_ << '"';
    for (const char c : v) {
      if (c == '"' || c == '\\') out_ << '\\';
      out_ << c;
    }
    out_ << '"';
  }
  void value(double v) {
    separate();
    out_ << format_double(v);
  }
  void value(std::uint64_t v) {
    separate();
    out_ << v;
  }
  void value(unsigned v) {
    separate();
    out_ << v;
  }
  void value(bool v) {
    separate();
    out_ << (v ? "true" : "false");
  }

 private:
  void separate() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostream& out_;
  bool first_ = true;
};

void write_meta(JsonWriter& w, const Meta& m, bool with_timings) {
  w.key("meta");
  w.begin_object();
  w.key("algorithm");
  w.value(m.algorithm);
  w.key("n");
  w.value(m.n);
  w.key("m");
  w.value(m.m);
  w.key("alpha");
  w.value(m.alpha);
  w.key("mode");
  w.value(m.mode);
  w.key("shots");
  w.value(m.shots);
  w.key("seed");
  w.value(m.seed);
  if (with_timings) {
    w.key("timestamp");
    w.value(m.timestamp);
  }
  w.end_object();
}

void write_row(JsonWriter& w, const Row& r) {
  w.begin_object();
  w.key("index");
  w.value(r.index);
  w.key("quantum_estimate");
  w.value(r.quantum_estimate);
  w.key("classical_value");
  w.value(r.classical_value);
  w.key("abs_error");
  w.value(r.abs_error);
  w.key("error_bound");
  w.value(r.error_bound);
  w.key("within_bound");
  w.value(r.within_bound);
  w.key("m_hat");
  w.value(r.m_hat);
  w.key("peak_lo");
  w.value(r.peak_lo);
  w.key("peak_hi");
  w.value(r.peak_hi);
  w.key("oracle_calls");
  w.value(r.oracle_calls);
  w.key("low_coverage");
  w.value(r.low_coverage);
  if (r.has_raw) {
    w.key("estimate_raw");
    w.value(r.estimate_raw);
    w.key("classical_raw");
    w.value(r.classical_raw);
  }
  w.end_object();
}

void write_summary(JsonWriter& w, const Summary& s, bool with_timings) {
  w.key("summary");
  w.begin_object();
  w.key("max_abs_error");
  w.value(s.max_abs_error);
  w.key("fraction_within_bound");
  w.value(s.fraction_within_bound);
  w.key("total_oracle_calls");
  w.value(s.total_oracle_calls);
  if (with_timings) {
    w.key("wall_time_ms");
    w.value(s.wall_time_ms);
  }
  w.end_object();
}

const char* kRowCsvHeader =
    "index,quantum_estimate,classical_value,abs_error,error_bound,"
    "within_bound,m_hat,peak_lo,peak_hi,oracle_calls,low_coverage,"
    "estimate_raw,classical_raw";

void write_row_csv(std::ostream& out, const Row& r) {
  out << r.index << ',' << format_double(r.quantum_estimate) << ','
      << format_double(r.classical_value) << ','
      << format_double(r.abs_error) << ',' << format_double(r.error_bound)
      << ',' << (r.within_bound ? 1 : 0) << ',' << r.m_hat << ','
      << format_double(r.peak_lo) << ',' << format_double(r.peak_hi) << ','
      << r.oracle_calls << ',' << (r.low_coverage ? 1 : 0);
  if (r.has_raw) {
    out << ',' << format_double(r.estimate_raw) << ','
        << format_double(r.classical_raw);
  } else {
    out << ",,";
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string current_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool RunReport::all_within_bound() const {
  for (const Row& r : rows) {
    if (!r.within_bound) return false;
  }
  return true;
}

bool EmmlReport::all_within_bound() const {
  for (const auto& b : blocks) {
    for (const Row& r : b.rows) {
      if (!r.within_bound) return false;
    }
  }
  return true;
}

void write_json(const RunReport& r, std::ostream& out, bool with_timings) {
  JsonWriter w(out);
  w.begin_object();
  write_meta(w, r.meta, with_timings);
  w.key("rows");
  w.begin_array();
  for (const Row& row : r.rows) write_row(w, row);
  w.end_array();
  write_summary(w, r.summary, with_timings);
  w.end_object();
  out << '\n';
}

void write_csv(const RunReport& r, std::ostream& out, bool with_timings) {
  out << kRowCsvHeader << '\n';
  for (const Row& row : r.rows) write_row_csv(out, row);
  out << "# algorithm=" << r.meta.algorithm << " n=" << r.meta.n
      << " m=" << r.meta.m << " mode=" << r.meta.mode
      << " seed=" << r.meta.seed << '\n';
  out << "# max_abs_error=" << format_double(r.summary.max_abs_error)
      << " fraction_within_bound="
      << format_double(r.summary.fraction_within_bound)
      << " total_oracle_calls=" << r.summary.total_oracle_calls;
  if (with_timings) {
    out << " wall_time_ms=" << format_double(r.summary.wall_time_ms);
  }
  out << '\n';
}

void write_json(const EmmlReport& r, std::ostream& out, bool with_timings) {
  JsonWriter w(out);
  w.begin_object();
  write_meta(w, r.meta, with_timings);
  w.key("iterations");
  w.begin_array();
  for (const auto& b : r.blocks) {
    w.begin_object();
    w.key("t");
    w.value(b.t);
    w.key("array_id");
    w.value(static_cast<std::uint64_t>(b.array_id));
    w.key("array_name");
    w.value(b.array_name);
    w.key("l_inf_change");
    w.value(b.l_inf_change);
    w.key("sum_before_renorm");
    w.value(b.sum_before_renorm);
    w.key("oracle_calls");
    w.value(b.oracle_calls);
    w.key("rows");
    w.begin_array();
    for (const Row& row : b.rows) write_row(w, row);
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.key("convergence");
  w.begin_object();
  w.key("iterations_run");
  w.value(r.iterations_run);
  w.key("converged");
  w.value(r.converged);
  w.end_object();
  write_summary(w, r.summary, with_timings);
  w.end_object();
  out << '\n';
}

void write_csv(const EmmlReport& r, std::ostream& out, bool with_timings) {
  out << "t,array_id,array_name," << kRowCsvHeader << '\n';
  for (const auto& b : r.blocks) {
    for (const Row& row : b.rows) {
      out << b.t << ',' << b.array_id << ',' << b.array_name << ',';
      write_row_csv(out, row);
    }
  }
  for (const auto& b : r.blocks) {
    out << "# t=" << b.t << " array_id=" << b.array_id
        << " l_inf_change=" << format_double(b.l_inf_change)
        << " sum_before_renorm=" << format_double(b.sum_before_renorm)
        << " oracle_calls=" << b.oracle_calls << '\n';
  }
  out << "# iterations_run=" << r.iterations_run
      << " converged=" << (r.converged ? 1 : 0)
      << " total_oracle_calls=" << r.summary.total_oracle_calls;
  if (with_timings) {
    out << " wall_time_ms=" << format_double(r.summary.wall_time_ms);
  }
  out << '\n';
}

void write_json(const SweepReport& r, std::ostream& out, bool with_timings) {
  JsonWriter w(out);
  w.begin_object();
  write_meta(w, r.meta, with_timings);
  w.key("rows");
  w.begin_array();
  for (const SweepRow& row : r.rows) {
    w.begin_object();
    w.key("m");
    w.value(row.m);
    w.key("max_abs_error");
    w.value(row.max_abs_error);
    w.key("mean_abs_error");
    w.value(row.mean_abs_error);
    w.key("mean_error_bound");
    w.value(row.mean_error_bound);
    w.key("total_oracle_calls");
    w.value(row.total_oracle_calls);
    w.key("calls_per_estimate");
    w.value(row.calls_per_estimate);
    w.key("classical_fft_cost");
    w.value(row.classical_fft_cost);
    w.key("classical_emml_pixel_cost");
    w.value(row.classical_emml_pixel_cost);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  out << '\n';
}

void write_csv(const SweepReport& r, std::ostream& out, bool) {
  out << "m,max_abs_error,mean_abs_error,mean_error_bound,total_oracle_calls,"
         "calls_per_estimate,classical_fft_cost,classical_emml_pixel_cost\n";
  for (const SweepRow& row : r.rows) {
    out << row.m << ',' << format_double(row.max_abs_error) << ','
        << format_double(row.mean_abs_error) << ','
        << format_double(row.mean_error_bound) << ','
        << row.total_oracle_calls << ',' << row.calls_per_estimate << ','
        << format_double(row.classical_fft_cost) << ','
        << format_double(row.classical_emml_pixel_cost) << '\n';
  }
  out << "# algorithm=" << r.meta.algorithm << " n=" << r.meta.n
      << " mode=" << r.meta.mode << " seed=" << r.meta.seed << '\n';
}

}  // namespace qcorr::report
