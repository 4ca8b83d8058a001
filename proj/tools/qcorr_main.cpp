#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcorr/classical_ref.hpp"
#include "qcorr/encoding.hpp"
#include "qcorr/io.hpp"
#include "qcorr/kernels.hpp"
#include "qcorr/qae_crosscorr.hpp"
#include "qcorr/qae_emml.hpp"
#include "qcorr/report.hpp"
#include "qcorr/selftest.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct OutputFlags {
  std::string out;     // empty = stdout
  std::string format = "json";
  bool with_timings = false;
};

void add_output_flags(CLI::App* cmd, OutputFlags& flags) {
  cmd->add_option("--out", flags.out, "Write the report to this file");
  cmd->add_option("--format", flags.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--with-timings", flags.with_timings,
                "Include timestamp and wall time in the report (breaks "
                "byte-for-byte reproducibility)");
}

template <class Report>
void emit(const Report& r, const OutputFlags& flags) {
  std::ostringstream buf;
  if (flags.format == "csv") {
    qcorr::report::write_csv(r, buf, flags.with_timings);
  } else {
    qcorr::report::write_json(r, buf, flags.with_timings);
  }
  if (flags.out.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream f(flags.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + flags.out);
    f << buf.str();
  }
}

qcorr::RunMode parse_mode(const std::string& mode) {
  if (mode == "exact") return qcorr::RunMode::exact;
  if (mode == "sampling") return qcorr::RunMode::sampling;
  throw CLI::ValidationError("--mode", "expected 'exact' or 'sampling'");
}

void check_declared_n(unsigned declared, std::size_t actual,
                      const std::string& what) {
  if (declared != 0 && declared != actual) {
    throw std::runtime_error(what + ": declared --n " +
                             std::to_string(declared) + " but the input has " +
                             std::to_string(actual) + " elements per side");
  }
}

struct CrossCorrArgs {
  std::string path_a, path_b;
  unsigned n = 0;
  unsigned m = 0;
  double alpha = 16.0;
  std::string mode = "exact";
  std::uint64_t shots = 4096;
  std::uint64_t seed = 0;
  OutputFlags output;
};

// Builds the report rows shared by the crosscorr and sweep commands.
qcorr::report::RunReport crosscorr_report(
    const qcorr::ProbArray& a, const qcorr::ProbArray& b,
    const qcorr::AffineParams& pa, const qcorr::AffineParams& pb,
    std::span<const double> raw_a, std::span<const double> raw_b,
    const qcorr::CrossCorrConfig& cfg0) {
  const auto cfg = cfg0.resolved();
  const auto t0 = Clock::now();
  const auto outcomes = qcorr::run_crosscorr(a, b, cfg);
  const auto classical = qcorr::classical::crosscorr_brute(a.values(),
                                                           b.values());
  const bool have_raw = !pa.degenerate && !pb.degenerate;
  std::vector<double> estimates(outcomes.size());
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    estimates[j] = outcomes[j].estimate;
  }
  std::vector<double> est_raw, cls_raw;
  if (have_raw) {
    est_raw = qcorr::denormalize_correlation(estimates, pa, pb);
    cls_raw = qcorr::classical::crosscorr_brute(raw_a, raw_b).values;
  }

  qcorr::report::RunReport rep;
  rep.meta = {"crosscorr", cfg.n,  cfg.m,
              cfg.alpha,   cfg.mode == qcorr::RunMode::exact ? "exact"
                                                             : "sampling",
              cfg.shots,   cfg.seed,
              qcorr::report::current_timestamp()};
  rep.rows.reserve(outcomes.size());
  std::uint64_t within = 0;
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    const auto& o = outcomes[j];
    qcorr::report::Row row;
    row.index = o.j_bar;
    row.quantum_estimate = o.estimate;
    row.classical_value = classical.values[j];
    row.abs_error = std::abs(o.estimate - classical.values[j]);
    row.error_bound = o.error_bound;
    row.within_bound = row.abs_error <= row.error_bound;
    row.m_hat = o.m_hat;
    const auto peaks = qcorr::theoretical_peak(
        std::clamp(classical.values[j], 0.0, 1.0), cfg.m);
    row.peak_lo = peaks.first;
    row.peak_hi = peaks.second;
    row.oracle_calls = o.oracle_calls;
    row.low_coverage = o.low_coverage;
    if (have_raw) {
      row.has_raw = true;
      row.estimate_raw = est_raw[j];
      row.classical_raw = cls_raw[j];
    }
    within += row.within_bound ? 1 : 0;
    rep.summary.max_abs_error = std::max(rep.summary.max_abs_error,
                                         row.abs_error);
    rep.rows.push_back(row);
  }
  rep.summary.fraction_within_bound =
      rep.rows.empty() ? 1.0
                       : static_cast<double>(within) /
                             static_cast<double>(rep.rows.size());
  rep.summary.total_oracle_calls =
      outcomes.empty() ? 0 : outcomes.front().oracle_calls;
  rep.summary.wall_time_ms = ms_since(t0);
  return rep;
}

int run_crosscorr_cmd(const CrossCorrArgs& args) {
  const qcorr::RawArray raw_a = qcorr::io::load_array(args.path_a);
  const qcorr::RawArray raw_b = qcorr::io::load_array(args.path_b);
  if (raw_a.is_2d() || raw_b.is_2d()) {
    throw std::runtime_error("crosscorr expects 1D arrays");
  }
  if (raw_a.values.size() != raw_b.values.size()) {
    throw std::runtime_error(
        args.path_a + " and " + args.path_b + " have different lengths (" +
        std::to_string(raw_a.values.size()) + " vs " +
        std::to_string(raw_b.values.size()) + ")");
  }
  check_declared_n(args.n, raw_a.values.size(), args.path_a);

  const auto [a, pa] = qcorr::normalize(raw_a);
  const auto [b, pb] = qcorr::normalize(raw_b);
  qcorr::CrossCorrConfig cfg;
  cfg.n = static_cast<unsigned>(a.size());
  cfg.m = args.m;
  cfg.alpha = args.alpha;
  cfg.mode = parse_mode(args.mode);
  cfg.shots = args.shots;
  cfg.seed = args.seed;

  const auto rep = crosscorr_report(a, b, pa, pb, raw_a.values, raw_b.values,
                                    cfg);
  emit(rep, args.output);
  return rep.all_within_bound() ? 0 : 2;
}

struct EmmlArgs {
  std::string dir;
  unsigned n = 0;
  unsigned m = 0;
  double alpha = 16.0;
  unsigned iterations = 1;
  double tol = 1e-9;
  std::string mode = "exact";
  std::uint64_t shots = 4096;
  std::uint64_t seed = 0;
  OutputFlags output;
};

int run_emml_cmd(const EmmlArgs& args) {
  const auto inputs = qcorr::io::load_array_directory(args.dir);
  std::vector<std::string> names;
  std::vector<qcorr::ProbArray2D> arrays;
  for (const auto& [name, raw] : inputs) {
    if (!raw.is_2d()) {
      throw std::runtime_error(name + ": emml expects N x N arrays");
    }
    check_declared_n(args.n, raw.side, name);
    arrays.push_back(qcorr::normalize_2d(raw).first);
    names.push_back(name);
  }
  for (const auto& arr : arrays) {
    if (arr.side() != arrays.front().side()) {
      throw std::runtime_error("arrays in " + args.dir +
                               " have mismatched shapes");
    }
  }
  if (args.iterations < 1) {
    throw CLI::ValidationError("--iterations", "must be >= 1");
  }

  qcorr::EmmlConfig cfg;
  cfg.n = arrays.front().side();
  cfg.m = args.m;
  cfg.alpha = args.alpha;
  cfg.mode = parse_mode(args.mode);
  cfg.shots = args.shots;
  cfg.seed = args.seed;
  cfg.max_iterations = args.iterations;
  cfg.convergence_tol = args.tol;
  const auto rcfg = cfg.resolved();

  const auto t0 = Clock::now();
  qcorr::report::EmmlReport rep;
  rep.meta = {"emml",    rcfg.n, rcfg.m,
              rcfg.alpha, rcfg.mode == qcorr::RunMode::exact ? "exact"
                                                             : "sampling",
              rcfg.shots, rcfg.seed,
              qcorr::report::current_timestamp()};

  // Template = average of the inputs.
  const unsigned n = rcfg.n;
  const std::size_t pixels = std::size_t{n} * n;
  std::vector<double> templ(pixels, 0.0);
  for (const auto& arr : arrays) {
    for (std::size_t p = 0; p < pixels; ++p) templ[p] += arr.values()[p];
  }
  double tsum = std::accumulate(templ.begin(), templ.end(), 0.0);
  for (double& v : templ) v /= tsum;
  qcorr::EmmlState state{qcorr::ProbArray2D(std::move(templ), n),
                         std::move(arrays), 0};

  bool converged = false;
  unsigned iterations_run = 0;
  for (unsigned iter = 0; iter < rcfg.max_iterations && !converged; ++iter) {
    // Classical reference for this round, from the same pre-update state.
    std::vector<qcorr::ProbArray2D> classical_next;
    for (const auto& d : state.data) {
      classical_next.push_back(
          qcorr::classical::emml_step(state.template_array, d));
    }
    std::vector<qcorr::EmmlIterationRow> rows;
    std::vector<std::vector<qcorr::PixelEstimate>> estimates;
    state = qcorr::emml_iteration(state, rcfg, &rows, &estimates);
    ++iterations_run;

    double l_inf = 0.0;
    for (std::size_t array_id = 0; array_id < estimates.size(); ++array_id) {
      qcorr::report::EmmlArrayBlock block;
      block.t = state.t;
      block.array_id = array_id;
      block.array_name = names[array_id];
      block.l_inf_change = rows[array_id].l_inf_change;
      block.sum_before_renorm = rows[array_id].sum_before_renorm;
      block.oracle_calls = rows[array_id].oracle_calls;
      for (const auto& est : estimates[array_id]) {
        qcorr::report::Row row;
        row.index = std::uint64_t{est.j} * n + est.k;
        row.quantum_estimate = est.value;
        row.classical_value = classical_next[array_id].at(est.j, est.k);
        row.abs_error = std::abs(row.quantum_estimate - row.classical_value);
        row.error_bound = est.error_bound;
        row.within_bound = row.abs_error <= row.error_bound;
        row.m_hat = est.theta;
        const auto peaks = qcorr::theoretical_peak(
            std::clamp(row.classical_value, 0.0, 1.0), rcfg.m);
        row.peak_lo = peaks.first;
        row.peak_hi = peaks.second;
        row.oracle_calls = est.oracle_calls;
        row.low_coverage = est.low_coverage;
        rep.summary.max_abs_error =
            std::max(rep.summary.max_abs_error, row.abs_error);
        block.rows.push_back(row);
      }
      rep.summary.total_oracle_calls += block.oracle_calls;
      l_inf = std::max(l_inf, block.l_inf_change);
      rep.blocks.push_back(std::move(block));
    }
    converged = l_inf < rcfg.convergence_tol;
  }
  rep.iterations_run = iterations_run;
  rep.converged = converged;
  std::uint64_t within = 0, total = 0;
  for (const auto& b : rep.blocks) {
    for (const auto& r : b.rows) {
      ++total;
      within += r.within_bound ? 1 : 0;
    }
  }
  rep.summary.fraction_within_bound =
      total == 0 ? 1.0
                 : static_cast<double>(within) / static_cast<double>(total);
  rep.summary.wall_time_ms = ms_since(t0);
  emit(rep, args.output);
  return rep.all_within_bound() ? 0 : 2;
}

struct SweepArgs {
  CrossCorrArgs base;
  std::vector<unsigned> m_list;
  std::vector<double> alpha_list;
};

int run_sweep_cmd(const SweepArgs& args) {
  if (args.m_list.empty() && args.alpha_list.empty()) {
    throw CLI::ValidationError("sweep",
                               "provide --m-list or --alpha-list");
  }
  const qcorr::RawArray raw_a = qcorr::io::load_array(args.base.path_a);
  const qcorr::RawArray raw_b = qcorr::io::load_array(args.base.path_b);
  if (raw_a.is_2d() || raw_b.is_2d() ||
      raw_a.values.size() != raw_b.values.size()) {
    throw std::runtime_error("sweep expects two 1D arrays of equal length");
  }
  check_declared_n(args.base.n, raw_a.values.size(), args.base.path_a);
  const auto [a, pa] = qcorr::normalize(raw_a);
  const auto [b, pb] = qcorr::normalize(raw_b);
  const unsigned n = static_cast<unsigned>(a.size());

  std::vector<unsigned> ms = args.m_list;
  for (const double alpha : args.alpha_list) {
    if (!(alpha > 0.0)) {
      throw CLI::ValidationError("--alpha-list", "alphas must be positive");
    }
    ms.push_back(qcorr::next_pow2_at_least(
        alpha * std::sqrt(static_cast<double>(n)), 4));
  }

  qcorr::report::SweepReport rep;
  rep.meta = {"sweep",
              n,
              0,
              args.base.alpha,
              args.base.mode,
              args.base.shots,
              args.base.seed,
              qcorr::report::current_timestamp()};
  const double log2n = std::log2(static_cast<double>(n));
  for (const unsigned m : ms) {
    qcorr::CrossCorrConfig cfg;
    cfg.n = n;
    cfg.m = m;
    cfg.alpha = args.base.alpha;
    cfg.mode = parse_mode(args.base.mode);
    cfg.shots = args.base.shots;
    cfg.seed = args.base.seed;
    const auto run = crosscorr_report(a, b, pa, pb, raw_a.values,
                                      raw_b.values, cfg);
    qcorr::report::SweepRow row;
    row.m = m;
    row.max_abs_error = run.summary.max_abs_error;
    double mean_err = 0.0, mean_bound = 0.0;
    for (const auto& r : run.rows) {
      mean_err += r.abs_error;
      mean_bound += r.error_bound;
    }
    row.mean_abs_error = mean_err / static_cast<double>(run.rows.size());
    row.mean_error_bound = mean_bound / static_cast<double>(run.rows.size());
    row.total_oracle_calls = run.summary.total_oracle_calls;
    row.calls_per_estimate = m - 1;
    row.classical_fft_cost = static_cast<double>(n) * log2n;
    row.classical_emml_pixel_cost =
        static_cast<double>(n) * static_cast<double>(n) * log2n;
    rep.rows.push_back(row);
  }
  emit(rep, args.base.output);
  return 0;
}

int run_selftest_cmd(std::uint64_t seed) {
  std::cout << "kernel backend: " << qcorr::kernels::active().name << "\n";
  const auto results = qcorr::selftest::run_all(seed);
  std::size_t failed = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << "\n";
    failed += r.pass ? 0 : 1;
  }
  std::cout << results.size() - failed << "/" << results.size()
            << " checks passed\n";
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Amplitude-estimation cross-correlation simulator with classical "
      "reference oracles"};
  app.require_subcommand(1);

  CrossCorrArgs cc;
  CLI::App* cmd_cc = app.add_subcommand(
      "crosscorr",
      "Estimate all circular cross-correlation values of two arrays");
  cmd_cc->add_option("a", cc.path_a, "Array A (.csv or .json)")->required();
  cmd_cc->add_option("b", cc.path_b, "Array B (.csv or .json)")->required();
  cmd_cc->add_option("--n", cc.n, "Expected array length (validation only)");
  cmd_cc->add_option("--m", cc.m, "Readout dimension M (power of two >= 4)");
  cmd_cc->add_option("--alpha", cc.alpha,
                     "M = smallest power of two >= alpha*sqrt(N) when --m "
                     "is not given");
  cmd_cc->add_option("--mode", cc.mode, "exact or sampling")
      ->check(CLI::IsMember({"exact", "sampling"}));
  cmd_cc->add_option("--shots", cc.shots, "Samples in sampling mode");
  cmd_cc->add_option("--seed", cc.seed, "RNG seed (sampling mode)");
  add_output_flags(cmd_cc, cc.output);

  EmmlArgs em;
  CLI::App* cmd_em = app.add_subcommand(
      "emml", "Run the translation-model EM iteration on a set of arrays");
  cmd_em->add_option("dir", em.dir, "Directory of N x N arrays")->required();
  cmd_em->add_option("--n", em.n, "Expected array side (validation only)");
  cmd_em->add_option("--m", em.m, "Readout dimension M (power of two >= 4)");
  cmd_em->add_option("--alpha", em.alpha,
                     "M = smallest power of two >= alpha*N when --m is not "
                     "given");
  cmd_em->add_option("--iterations", em.iterations, "Maximum EM rounds")
      ->check(CLI::PositiveNumber);
  cmd_em->add_option("--tol", em.tol,
                     "Stop when the largest per-pixel change drops below "
                     "this");
  cmd_em->add_option("--mode", em.mode, "exact or sampling")
      ->check(CLI::IsMember({"exact", "sampling"}));
  cmd_em->add_option("--shots", em.shots, "Samples in sampling mode");
  cmd_em->add_option("--seed", em.seed, "RNG seed (sampling mode)");
  add_output_flags(cmd_em, em.output);

  SweepArgs sw;
  CLI::App* cmd_sw = app.add_subcommand(
      "sweep", "Run crosscorr over a list of readout dimensions");
  cmd_sw->add_option("a", sw.base.path_a, "Array A")->required();
  cmd_sw->add_option("b", sw.base.path_b, "Array B")->required();
  cmd_sw->add_option("--n", sw.base.n, "Expected array length");
  cmd_sw->add_option("--m-list", sw.m_list, "Readout dimensions to sweep")
      ->delimiter(',');
  cmd_sw->add_option("--alpha-list", sw.alpha_list,
                     "Alphas to sweep (each mapped to a power-of-two M)")
      ->delimiter(',');
  cmd_sw->add_option("--mode", sw.base.mode, "exact or sampling")
      ->check(CLI::IsMember({"exact", "sampling"}));
  cmd_sw->add_option("--shots", sw.base.shots, "Samples in sampling mode");
  cmd_sw->add_option("--seed", sw.base.seed, "RNG seed");
  add_output_flags(cmd_sw, sw.base.output);

  std::uint64_t selftest_seed = 0;
  CLI::App* cmd_st = app.add_subcommand(
      "selftest", "Dense-matrix oracle suite for the statevector engine");
  cmd_st->add_option("--seed", selftest_seed, "Seed for the random checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (cmd_cc->parsed()) return run_crosscorr_cmd(cc);
    if (cmd_em->parsed()) return run_emml_cmd(em);
    if (cmd_sw->parsed()) return run_sweep_cmd(sw);
    if (cmd_st->parsed()) return run_selftest_cmd(selftest_seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
