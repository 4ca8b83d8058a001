#include "qcorr/qae_emml.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

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

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void grover_g_impl(StateVector& st, std::span<const double> sqrt_templ,
                   std::span<const double> sqrt_data,
                   std::span<const double> sqrt_shifted, IndexMask mask) {
  st.reflect_difference_condition("C1", "templ", "C2", /*parts=*/2, mask);
  const std::array<ProductFactor, 3> factors{
      ProductFactor::real("templ", sqrt_templ),
      ProductFactor::real("C1", sqrt_data),
      ProductFactor::real("C2", sqrt_shifted)};
  st.diffuse_about_product_state(factors, mask);
}

void check_shapes(const ProbArray2D& templ, const ProbArray2D& data,
                  unsigned n) {
  if (templ.side() != n || data.side() != n) {
    throw std::invalid_argument("array side " + std::to_string(templ.side()) +
                                "/" + std::to_string(data.side()) +
                                " does not match N = " + std::to_string(n));
  }
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be
// written to disjoint slots by the callers; the first exception wins.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(count, threads == 0 ? hw : threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

EmmlConfig EmmlConfig::resolved() const {
  EmmlConfig c = *this;
  if (c.n < 2 || !is_pow2(c.n)) {
    throw std::invalid_argument("N must be a power of two >= 2, got " +
                                std::to_string(c.n));
  }
  if (!(c.alpha > 0.0)) {
    throw std::invalid_argument("alpha must be positive");
  }
  if (c.m == 0) {
    c.m = next_pow2_at_least(c.alpha * static_cast<double>(c.n), 4);
  }
  if (c.m < 4 || !is_pow2(c.m)) {
    throw std::invalid_argument("M must be a power of two >= 4, got " +
                                std::to_string(c.m));
  }
  if (c.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be >= 1");
  }
  if (!(c.convergence_tol > 0.0)) {
    throw std::invalid_argument("convergence_tol must be positive");
  }
  if (c.mode == RunMode::sampling && c.shots == 0) {
    throw std::invalid_argument("sampling mode needs shots >= 1");
  }
  return c;
}

RegisterLayout build_layout_2d(unsigned n, unsigned m) {
  const unsigned log_n = log2_exact(n, "N");
  const unsigned log_m = log2_exact(m, "M");
  if (log_n == 0) throw std::invalid_argument("N must be >= 2");
  return RegisterLayout{{"templ", 2 * log_n},
                        {"C1", 2 * log_n},
                        {"C2", 2 * log_n},
                        {"new", log_m}};
}

StateVector initialize_emml(const ProbArray2D& templ, const ProbArray2D& data,
                            unsigned j, unsigned k,
                            const RegisterLayout& layout) {
  const unsigned n = templ.side();
  check_shapes(templ, data, n);
  if (layout.reg("templ").dim() != std::uint64_t{n} * n) {
    throw std::invalid_argument("layout register dimension does not match "
                                "the array side");
  }
  if (j >= n || k >= n) {
    throw std::invalid_argument("pixel (" + std::to_string(j) + ", " +
                                std::to_string(k) + ") out of range");
  }
  StateVector st = StateVector::allocate(layout);
  st.inject_amplitudes("templ", amplitudes_from(templ));
  st.inject_amplitudes("C1", amplitudes_from(data));
  st.inject_amplitudes("C2", amplitudes_from(cyclic_shift_2d(data, j, k)));
  return st;
}

void grover_g(StateVector& st, const ProbArray2D& templ,
              const ProbArray2D& data, unsigned j, unsigned k,
              IndexMask mask) {
  grover_g_impl(st, amplitudes_from(templ), amplitudes_from(data),
                amplitudes_from(cyclic_shift_2d(data, j, k)), mask);
}

PixelEstimate estimate_pixel(const ProbArray2D& templ, const ProbArray2D& data,
                             unsigned j, unsigned k,
                             const EmmlConfig& config) {
  const EmmlConfig cfg = config.resolved();
  check_shapes(templ, data, cfg.n);
  const RegisterLayout layout = build_layout_2d(cfg.n, cfg.m);
  StateVector st = initialize_emml(templ, data, j, k, layout);
  st.apply_qft("new");

  const std::vector<double> sqrt_templ = amplitudes_from(templ);
  const std::vector<double> sqrt_data = amplitudes_from(data);
  const std::vector<double> sqrt_shifted =
      amplitudes_from(cyclic_shift_2d(data, j, k));
  const std::uint64_t calls =
      st.controlled_power("new", [&](StateVector& s, IndexMask mask) {
        grover_g_impl(s, sqrt_templ, sqrt_data, sqrt_shifted, mask);
      });
  st.apply_qft("new", /*inverse=*/true);

  PixelEstimate est;
  est.j = j;
  est.k = k;
  est.oracle_calls = calls;
  if (cfg.mode == RunMode::exact) {
    est.distribution = st.conditional_distribution("new", {});
  } else {
    const std::vector<std::uint64_t> samples =
        st.sample_measurement({"new"}, cfg.seed, cfg.shots);
    std::vector<double> probs(cfg.m, 0.0);
    for (const std::uint64_t s : samples) probs[s] += 1.0;
    for (double& p : probs) p /= static_cast<double>(cfg.shots);
    est.distribution.target = "new";
    est.distribution.probabilities = std::move(probs);
    est.distribution.total_weight = 1.0;
    est.sample_count = cfg.shots;
    est.low_coverage = cfg.shots < 30;
  }
  est.theta = est.distribution.argmax();
  est.value = estimate_from_m(est.theta, cfg.m);
  est.error_bound = qae_error_bound(est.value, cfg.m);
  return est;
}

EmmlState emml_iteration(
    const EmmlState& state, const EmmlConfig& config,
    std::vector<EmmlIterationRow>* rows,
    std::vector<std::vector<PixelEstimate>>* pixel_estimates) {
  const EmmlConfig cfg = config.resolved();
  if (state.data.empty()) {
    throw std::invalid_argument("emml_iteration: no data arrays");
  }
  check_shapes(state.template_array, state.template_array, cfg.n);
  for (const auto& d : state.data) check_shapes(state.template_array, d, cfg.n);

  const unsigned n = cfg.n;
  const std::size_t pixels = std::size_t{n} * n;
  const unsigned next_t = state.t + 1;

  std::vector<ProbArray2D> updated;
  updated.reserve(state.data.size());
  for (std::size_t array_id = 0; array_id < state.data.size(); ++array_id) {
    const ProbArray2D& data = state.data[array_id];
    std::vector<double> values(pixels, 0.0);
    std::vector<std::uint64_t> calls(pixels, 0);
    std::vector<PixelEstimate> estimates(pixel_estimates ? pixels : 0);
    parallel_for(pixels, cfg.threads, [&](std::size_t p) {
      const unsigned j = static_cast<unsigned>(p / n);
      const unsigned k = static_cast<unsigned>(p % n);
      EmmlConfig pixel_cfg = cfg;
      pixel_cfg.seed = pixel_stream_seed(cfg.seed, next_t, array_id, j, k);
      PixelEstimate est =
          estimate_pixel(state.template_array, data, j, k, pixel_cfg);
      values[p] = est.value;
      calls[p] = est.oracle_calls;
      if (pixel_estimates) estimates[p] = std::move(est);
    });
    if (pixel_estimates) pixel_estimates->push_back(std::move(estimates));
    double sum_before = 0.0;
    for (const double v : values) sum_before += v;
    std::uint64_t total_calls = 0;
    for (const std::uint64_t c : calls) total_calls += c;

    if (sum_before > 0.0) {
      for (double& v : values) v /= sum_before;
    } else {
      // All-zero estimates carry no structure; fall back to uniform.
      std::fill(values.begin(), values.end(),
                1.0 / static_cast<double>(pixels));
    }
    double l_inf = 0.0;
    for (std::size_t p = 0; p < pixels; ++p) {
      l_inf = std::max(l_inf, std::abs(values[p] - data.values()[p]));
    }
    if (rows) {
      rows->push_back(
          EmmlIterationRow{next_t, array_id, l_inf, sum_before, total_calls});
    }
    updated.emplace_back(std::move(values), n);
  }

  // Template = per-pixel average of the renormalized arrays, renormalized
  // once more against accumulated rounding.
  std::vector<double> templ(pixels, 0.0);
  for (const auto& d : updated) {
    for (std::size_t p = 0; p < pixels; ++p) templ[p] += d.values()[p];
  }
  double tsum = 0.0;
  for (const double v : templ) tsum += v;
  for (double& v : templ) v /= tsum;

  return EmmlState{ProbArray2D(std::move(templ), n), std::move(updated),
                   next_t};
}

EmmlRunResult run_emml(std::vector<ProbArray2D> initial_data,
                       const EmmlConfig& config) {
  const EmmlConfig cfg = config.resolved();
  if (initial_data.empty()) {
    throw std::invalid_argument("run_emml: empty array set");
  }
  for (const auto& d : initial_data) {
    if (d.side() != cfg.n) {
      throw std::invalid_argument("run_emml: array side " +
                                  std::to_string(d.side()) +
                                  " does not match N = " +
                                  std::to_string(cfg.n));
    }
  }
  const std::size_t pixels = std::size_t{cfg.n} * cfg.n;
  std::vector<double> templ(pixels, 0.0);
  for (const auto& d : initial_data) {
    for (std::size_t p = 0; p < pixels; ++p) templ[p] += d.values()[p];
  }
  double tsum = 0.0;
  for (const double v : templ) tsum += v;
  for (double& v : templ) v /= tsum;

  EmmlRunResult result{
      EmmlState{ProbArray2D(std::move(templ), cfg.n), std::move(initial_data),
                0},
      {},
      {},
      0,
      false};

  for (unsigned iter = 0; iter < cfg.max_iterations; ++iter) {
    const std::size_t row_start = result.rows.size();
    result.state = emml_iteration(result.state, cfg, &result.rows);
    double l_inf = 0.0;
    for (std::size_t r = row_start; r < result.rows.size(); ++r) {
      l_inf = std::max(l_inf, result.rows[r].l_inf_change);
      result.total_oracle_calls += result.rows[r].oracle_calls;
    }
    result.iteration_l_inf.push_back(l_inf);
    if (l_inf < cfg.convergence_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

std::uint64_t pixel_stream_seed(std::uint64_t seed, unsigned t,
                                std::size_t array_id, unsigned j, unsigned k) {
  std::uint64_t s = splitmix64(seed ^ 0x713c4c5386beb1a1ULL);
  s = splitmix64(s ^ t);
  s = splitmix64(s ^ array_id);
  s = splitmix64(s ^ j);
  s = splitmix64(s ^ k);
  return s;
}

}  // namespace qcorr
