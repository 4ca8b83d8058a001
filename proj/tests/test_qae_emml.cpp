#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qcorr/classical_ref.hpp"
#include "qcorr/encoding.hpp"
#include "qcorr/qae_emml.hpp"

using qcorr::cxd;
using qcorr::EmmlConfig;
using qcorr::EmmlState;
using qcorr::ProbArray2D;
using qcorr::RegisterLayout;
using qcorr::RunMode;
using qcorr::StateVector;

namespace {

ProbArray2D random_prob2d(unsigned n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(std::size_t{n} * n);
  double sum = 0.0;
  for (auto& x : v) {
    x = u(rng);
    sum += x;
  }
  for (auto& x : v) x /= sum;
  return ProbArray2D(std::move(v), n);
}

ProbArray2D uniform2d(unsigned n) {
  return ProbArray2D(
      std::vector<double>(std::size_t{n} * n,
                          1.0 / static_cast<double>(std::size_t{n} * n)),
      n);
}

// Eigenvector of the pixel-update iterate: (|good> + sign*i |bad>)/sqrt(2)
// over (templ, C1, C2), readout register in |0>.
std::vector<cxd> make_eigenvector_2d(const ProbArray2D& templ,
                                     const ProbArray2D& data, unsigned j,
                                     unsigned k, int sign,
                                     const RegisterLayout& layout) {
  const unsigned n = templ.side();
  const ProbArray2D shifted = qcorr::cyclic_shift_2d(data, j, k);
  const double x_new =
      qcorr::classical::emml_step(templ, data).at(j, k);
  std::vector<cxd> v(layout.dim(), cxd{0.0, 0.0});
  const auto pack = [n](unsigned row, unsigned col) {
    return std::uint64_t{row} * n + col;
  };
  for (unsigned tr = 0; tr < n; ++tr) {
    for (unsigned tc = 0; tc < n; ++tc) {
      for (unsigned jb = 0; jb < n; ++jb) {
        for (unsigned kb = 0; kb < n; ++kb) {
          const unsigned c1r = (tr + jb) % n;
          const unsigned c1c = (tc + kb) % n;
          const double w = std::sqrt(templ.at(tr, tc) * data.at(c1r, c1c) *
                                     shifted.at(jb, kb) / x_new) /
                           std::sqrt(2.0);
          const std::uint64_t g = layout.index_of(std::vector<std::uint64_t>{
              pack(tr, tc), pack(c1r, c1c), pack(jb, kb), 0});
          v[g] += cxd{w, 0.0};
        }
      }
    }
  }
  for (std::uint64_t td = 0; td < layout.reg("templ").dim(); ++td) {
    for (std::uint64_t c1 = 0; c1 < layout.reg("C1").dim(); ++c1) {
      for (std::uint64_t c2 = 0; c2 < layout.reg("C2").dim(); ++c2) {
        const auto row = [n](std::uint64_t d) { return d / n; };
        const auto col = [n](std::uint64_t d) { return d % n; };
        const bool good =
            (row(c1) + n - row(td)) % n == row(c2) &&
            (col(c1) + n - col(td)) % n == col(c2);
        if (good) continue;
        const double w =
            std::sqrt(templ.values()[td] * data.values()[c1] *
                      shifted.values()[c2] / (1.0 - x_new)) /
            std::sqrt(2.0);
        const std::uint64_t g = layout.index_of(
            std::vector<std::uint64_t>{td, c1, c2, 0});
        v[g] += cxd{0.0, sign * w};
      }
    }
  }
  return v;
}

}  // namespace

TEST_CASE("build_layout_2d") {
  const RegisterLayout l = qcorr::build_layout_2d(2, 16);
  CHECK(l.total_qubits() == 10);
  CHECK(l.registers()[0].name == "templ");
  CHECK(l.registers()[1].name == "C1");
  CHECK(l.registers()[2].name == "C2");
  CHECK(l.registers()[3].name == "new");
  CHECK(qcorr::build_layout_2d(4, 64).total_qubits() == 18);
  CHECK_THROWS_AS(qcorr::build_layout_2d(3, 16), std::invalid_argument);
}

TEST_CASE("emml config resolution") {
  EmmlConfig cfg;
  cfg.n = 2;
  CHECK(cfg.resolved().m == 32);  // alpha 16 * N 2
  cfg.n = 4;
  CHECK(cfg.resolved().m == 64);
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.resolved(), std::invalid_argument);
}

TEST_CASE("initialize_emml") {
  SUBCASE("uniform template and data, N=2") {
    const ProbArray2D u = uniform2d(2);
    const RegisterLayout l = qcorr::build_layout_2d(2, 4);
    const StateVector st = qcorr::initialize_emml(u, u, 0, 0, l);
    for (std::uint64_t g = 0; g < st.dim(); ++g) {
      if (l.digit(g, "new") == 0) {
        CHECK(std::abs(st.amplitude(g) - cxd{0.125, 0.0}) <= 1e-12);
      } else {
        CHECK(st.amplitude(g) == cxd{0.0, 0.0});
      }
    }
  }
  SUBCASE("delta data with shift (1,1) puts C2 mass at (1,1)") {
    std::vector<double> d(4, 0.0);
    d[0] = 1.0;  // delta at (0,0)
    const ProbArray2D delta(d, 2);
    const RegisterLayout l = qcorr::build_layout_2d(2, 4);
    const StateVector st =
        qcorr::initialize_emml(uniform2d(2), delta, 1, 1, l);
    // C2 amplitude at (jb,kb) is sqrt(x_{(1+jb)%2,(1+kb)%2}): nonzero only
    // at (1,1)
    for (std::uint64_t g = 0; g < st.dim(); ++g) {
      if (st.amplitude(g) == cxd{0.0, 0.0}) continue;
      CHECK(l.digit(g, "C2") == 3);  // packed (1,1)
    }
  }
  SUBCASE("norm 1") {
    std::mt19937_64 rng(1);
    const RegisterLayout l = qcorr::build_layout_2d(2, 8);
    const StateVector st = qcorr::initialize_emml(
        random_prob2d(2, rng), random_prob2d(2, rng), 1, 0, l);
    CHECK(std::abs(st.norm() - 1.0) <= 1e-12);
  }
  SUBCASE("shape and pixel range errors") {
    const RegisterLayout l = qcorr::build_layout_2d(2, 4);
    CHECK_THROWS_AS(
        qcorr::initialize_emml(uniform2d(4), uniform2d(4), 0, 0, l),
        std::invalid_argument);
    CHECK_THROWS_AS(
        qcorr::initialize_emml(uniform2d(2), uniform2d(2), 2, 0, l),
        std::invalid_argument);
  }
}

TEST_CASE("grover_g eigenstructure") {
  SUBCASE("uniform N=2: sin^2 theta = 1/4") {
    const ProbArray2D u = uniform2d(2);
    const RegisterLayout l = qcorr::build_layout_2d(2, 4);
    const double x_new = qcorr::classical::emml_step(u, u).at(0, 0);
    CHECK(x_new == doctest::Approx(0.25));
    const double theta = std::asin(std::sqrt(x_new));
    for (const int sign : {+1, -1}) {
      const auto v = make_eigenvector_2d(u, u, 0, 0, sign, l);
      StateVector st = StateVector::allocate(l);
      std::copy(v.begin(), v.end(), st.amplitudes().begin());
      qcorr::grover_g(st, u, u, 0, 0);
      const cxd lambda = std::polar(1.0, sign * 2.0 * theta);
      double resid = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        resid = std::max(resid, std::abs(st.amplitude(i) - lambda * v[i]));
      }
      CHECK(resid <= 1e-10);

      qcorr::grover_g(st, u, u, 0, 0);
      const cxd lambda2 = std::polar(1.0, sign * 4.0 * theta);
      resid = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        resid = std::max(resid, std::abs(st.amplitude(i) - lambda2 * v[i]));
      }
      CHECK(resid <= 1e-10);
      CHECK(std::abs(st.norm() - 1.0) <= 1e-12);
    }
  }
  SUBCASE("random N=2 instance") {
    std::mt19937_64 rng(2);
    const ProbArray2D templ = random_prob2d(2, rng);
    const ProbArray2D data = random_prob2d(2, rng);
    const RegisterLayout l = qcorr::build_layout_2d(2, 4);
    const auto next = qcorr::classical::emml_step(templ, data);
    for (unsigned j = 0; j < 2; ++j) {
      for (unsigned k = 0; k < 2; ++k) {
        const double x_new = next.at(j, k);
        if (x_new < 1e-9 || x_new > 1.0 - 1e-9) continue;
        const auto v = make_eigenvector_2d(templ, data, j, k, +1, l);
        StateVector st = StateVector::allocate(l);
        std::copy(v.begin(), v.end(), st.amplitudes().begin());
        qcorr::grover_g(st, templ, data, j, k);
        const cxd lambda = std::polar(1.0, 2.0 * std::asin(std::sqrt(x_new)));
        double resid = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
          resid = std::max(resid, std::abs(st.amplitude(i) - lambda * v[i]));
        }
        CHECK(resid <= 1e-10);
      }
    }
  }
}

TEST_CASE("estimate_pixel") {
  SUBCASE("uniform inputs estimate the fixed point 1/N^2") {
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 32;
    const ProbArray2D u = uniform2d(2);
    for (unsigned j = 0; j < 2; ++j) {
      for (unsigned k = 0; k < 2; ++k) {
        const auto est = qcorr::estimate_pixel(u, u, j, k, cfg);
        CHECK(std::abs(est.value - 0.25) <= est.error_bound);
        CHECK(est.oracle_calls == 31);
      }
    }
  }
  SUBCASE("delta template and data: exact peak at M/2") {
    std::vector<double> d(4, 0.0);
    d[0] = 1.0;
    const ProbArray2D delta(d, 2);
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 16;
    const auto est = qcorr::estimate_pixel(delta, delta, 0, 0, cfg);
    CHECK(est.theta == 8);
    CHECK(est.value == doctest::Approx(1.0));
    CHECK(est.distribution.probabilities[8] >= 1.0 - 1e-10);
  }
  SUBCASE("random instances stay within the bound, M=64") {
    std::mt19937_64 rng(3);
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 64;
    for (int trial = 0; trial < 3; ++trial) {
      const ProbArray2D templ = random_prob2d(2, rng);
      const ProbArray2D data = random_prob2d(2, rng);
      const auto next = qcorr::classical::emml_step(templ, data);
      for (unsigned j = 0; j < 2; ++j) {
        for (unsigned k = 0; k < 2; ++k) {
          const auto est = qcorr::estimate_pixel(templ, data, j, k, cfg);
          CHECK(std::abs(est.value - next.at(j, k)) <= est.error_bound);
        }
      }
    }
  }
  SUBCASE("readout distribution is mirror symmetric") {
    std::mt19937_64 rng(4);
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 16;
    const auto est = qcorr::estimate_pixel(random_prob2d(2, rng),
                                           random_prob2d(2, rng), 1, 1, cfg);
    const auto& p = est.distribution.probabilities;
    for (std::uint64_t m = 0; m < cfg.m; ++m) {
      CHECK(std::abs(p[m] - p[(cfg.m - m) % cfg.m]) <= 1e-10);
    }
  }
}

TEST_CASE("emml_iteration") {
  SUBCASE("uniform state is a fixed point") {
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 32;
    const EmmlState state{uniform2d(2), {uniform2d(2)}, 0};
    std::vector<qcorr::EmmlIterationRow> rows;
    const EmmlState next = qcorr::emml_iteration(state, cfg, &rows);
    CHECK(next.t == 1);
    REQUIRE(rows.size() == 1);
    // identical estimates renormalize to exactly 1/N^2
    CHECK(rows[0].l_inf_change <= 1e-15);
    CHECK(rows[0].oracle_calls == 4 * 31);
    for (const double v : next.data[0].values()) {
      CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
    }
  }
  SUBCASE("pre-renormalization sum is logged near 1") {
    std::mt19937_64 rng(5);
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 64;
    const EmmlState state{random_prob2d(2, rng),
                          {random_prob2d(2, rng), random_prob2d(2, rng)},
                          0};
    std::vector<qcorr::EmmlIterationRow> rows;
    const EmmlState next = qcorr::emml_iteration(state, cfg, &rows);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
      // each pixel is off by at most its bound, so the sum is off by at
      // most the summed bounds
      const double bound_sum =
          4.0 * qcorr::qae_error_bound(0.5, cfg.m);  // worst-case bound
      CHECK(std::abs(row.sum_before_renorm - 1.0) <= bound_sum);
    }
    // template is the average of the renormalized arrays
    const std::size_t pixels = 4;
    for (std::size_t p = 0; p < pixels; ++p) {
      const double avg = 0.5 * (next.data[0].values()[p] +
                                next.data[1].values()[p]);
      CHECK(next.template_array.values()[p] ==
            doctest::Approx(avg).epsilon(1e-12));
    }
  }
  SUBCASE("deterministic across thread counts") {
    std::mt19937_64 rng(6);
    const EmmlState state{random_prob2d(2, rng), {random_prob2d(2, rng)}, 0};
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 32;
    cfg.threads = 1;
    const EmmlState serial = qcorr::emml_iteration(state, cfg);
    cfg.threads = 4;
    const EmmlState parallel = qcorr::emml_iteration(state, cfg);
    for (std::size_t p = 0; p < 4; ++p) {
      CHECK(serial.data[0].values()[p] == parallel.data[0].values()[p]);
    }
  }
}

TEST_CASE("run_emml") {
  SUBCASE("one uniform array converges at t=1 with zero change") {
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 32;
    cfg.max_iterations = 5;
    cfg.convergence_tol = 1e-12;
    const auto result = qcorr::run_emml({uniform2d(2)}, cfg);
    CHECK(result.converged);
    CHECK(result.state.t == 1);
    CHECK(result.iteration_l_inf.size() == 1);
    CHECK(result.iteration_l_inf[0] <= 1e-15);
  }
  SUBCASE("two identical arrays track the classical trajectory") {
    std::mt19937_64 rng(7);
    const ProbArray2D arr = random_prob2d(2, rng);
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 64;
    cfg.max_iterations = 2;
    cfg.convergence_tol = 1e-12;
    const auto result = qcorr::run_emml({arr, arr}, cfg);
    CHECK(result.state.t >= 1);
    // classical reference: template == array, one exact step
    ProbArray2D classical = arr;
    for (unsigned t = 0; t < result.state.t; ++t) {
      classical = qcorr::classical::emml_step(classical, classical);
    }
    const double tol =
        4.0 * qcorr::qae_error_bound(0.5, cfg.m) * result.state.t + 1e-9;
    for (std::size_t p = 0; p < 4; ++p) {
      CHECK(std::abs(result.state.data[0].values()[p] -
                     classical.values()[p]) <= tol);
    }
  }
  SUBCASE("report length is bounded by max_iterations") {
    std::mt19937_64 rng(8);
    EmmlConfig cfg;
    cfg.n = 2;
    cfg.m = 16;
    cfg.max_iterations = 3;
    cfg.convergence_tol = 1e-15;
    const auto result =
        qcorr::run_emml({random_prob2d(2, rng), random_prob2d(2, rng)}, cfg);
    CHECK(result.iteration_l_inf.size() <= 3);
    CHECK(result.rows.size() == result.iteration_l_inf.size() * 2);
    CHECK(result.total_oracle_calls ==
          result.rows.size() * 4 * (cfg.m - 1));
  }
  SUBCASE("empty array set is rejected") {
    EmmlConfig cfg;
    cfg.n = 2;
    CHECK_THROWS_AS(qcorr::run_emml({}, cfg), std::invalid_argument);
  }
}

TEST_CASE("sampling mode pixel streams are deterministic and distinct") {
  const auto s1 = qcorr::pixel_stream_seed(7, 1, 0, 0, 1);
  const auto s2 = qcorr::pixel_stream_seed(7, 1, 0, 0, 1);
  CHECK(s1 == s2);
  CHECK(qcorr::pixel_stream_seed(7, 1, 0, 1, 0) != s1);
  CHECK(qcorr::pixel_stream_seed(7, 2, 0, 0, 1) != s1);
  CHECK(qcorr::pixel_stream_seed(8, 1, 0, 0, 1) != s1);

  std::mt19937_64 rng(9);
  const ProbArray2D templ = random_prob2d(2, rng);
  const ProbArray2D data = random_prob2d(2, rng);
  EmmlConfig cfg;
  cfg.n = 2;
  cfg.m = 32;
  cfg.mode = RunMode::sampling;
  cfg.shots = 2048;
  cfg.seed = 5;
  const auto est = qcorr::estimate_pixel(templ, data, 0, 1, cfg);
  const auto est2 = qcorr::estimate_pixel(templ, data, 0, 1, cfg);
  CHECK(est.theta == est2.theta);
  const double classical = qcorr::classical::emml_step(templ, data).at(0, 1);
  CHECK(std::abs(est.value - classical) <= est.error_bound + 0.05);
}
