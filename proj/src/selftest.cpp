#include "qcorr/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <sstream>

#include "qcorr/kernels.hpp"
#include "qcorr/layout.hpp"
#include "qcorr/state.hpp"

namespace qcorr::selftest {
namespace {

using Matrix = std::vector<cxd>;  // row-major d x d

Matrix identity(std::size_t d) {
  Matrix m(d * d, cxd{0.0, 0.0});
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] = 1.0;
  return m;
}

Matrix kron(const Matrix& a, std::size_t da, const Matrix& b,
            std::size_t db) {
  Matrix out(da * db * da * db, cxd{0.0, 0.0});
  const std::size_t d = da * db;
  for (std::size_t i = 0; i < da; ++i) {
    for (std::size_t j = 0; j < da; ++j) {
      for (std::size_t k = 0; k < db; ++k) {
        for (std::size_t l = 0; l < db; ++l) {
          out[(i * db + k) * d + (j * db + l)] = a[i * da + j] * b[k * db + l];
        }
      }
    }
  }
  return out;
}

std::vector<cxd> matvec(const Matrix& m, std::span<const cxd> v) {
  const std::size_t d = v.size();
  std::vector<cxd> out(d, cxd{0.0, 0.0});
  for (std::size_t i = 0; i < d; ++i) {
    cxd s{0.0, 0.0};
    for (std::size_t j = 0; j < d; ++j) s += m[i * d + j] * v[j];
    out[i] = s;
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b, std::size_t d) {
  Matrix out(d * d, cxd{0.0, 0.0});
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const cxd aik = a[i * d + k];
      if (aik == cxd{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += aik * b[k * d + j];
    }
  }
  return out;
}

// Embeds a register-local operator V (dim x dim) into the full space:
// identity on every other register, using the documented digit convention.
Matrix embed_register_op(const RegisterLayout& layout, const Register& r,
                         const Matrix& v) {
  const std::size_t full = layout.dim();
  const std::size_t d = r.dim();
  Matrix out(full * full, cxd{0.0, 0.0});
  const std::uint64_t rest_mask = (full - 1) & ~r.index_mask();
  for (std::uint64_t g = 0; g < full; ++g) {
    const std::uint64_t dig = layout.digit(g, r);
    const std::uint64_t rest = g & rest_mask;
    for (std::uint64_t dig2 = 0; dig2 < d; ++dig2) {
      out[((rest | (dig2 << r.lsb)) * full) + g] += v[dig2 * d + dig];
    }
  }
  return out;
}

Matrix dft_matrix(std::size_t d, int sign) {
  Matrix m(d * d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      m[k * d + j] = std::polar(
          scale, sign * 2.0 * std::numbers::pi * static_cast<double>(j) *
                     static_cast<double>(k) / static_cast<double>(d));
    }
  }
  return m;
}

Matrix hadamard_matrix(unsigned qubits) {
  const double c = 1.0 / std::sqrt(2.0);
  Matrix h{cxd{c, 0}, cxd{c, 0}, cxd{c, 0}, cxd{-c, 0}};
  Matrix out{cxd{1.0, 0.0}};
  std::size_t d = 1;
  for (unsigned q = 0; q < qubits; ++q) {
    out = kron(out, d, h, 2);
    d *= 2;
  }
  return out;
}

std::vector<cxd> random_unit_state(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cxd> v(dim);
  double n2 = 0.0;
  for (auto& x : v) {
    x = cxd{g(rng), g(rng)};
    n2 += std::norm(x);
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& x : v) x *= inv;
  return v;
}

std::vector<double> random_prob_amplitudes(std::size_t dim,
                                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(dim);
  double sum = 0.0;
  for (auto& x : p) {
    x = u(rng);
    sum += x;
  }
  std::vector<double> a(dim);
  for (std::size_t i = 0; i < dim; ++i) a[i] = std::sqrt(p[i] / sum);
  return a;
}

// Gram-Schmidt over random columns; good enough for tiny test unitaries.
Matrix random_unitary(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(d * d);
  for (std::size_t col = 0; col < d; ++col) {
    std::vector<cxd> v(d);
    for (auto& x : v) x = cxd{g(rng), g(rng)};
    for (std::size_t prev = 0; prev < col; ++prev) {
      cxd dot{0.0, 0.0};
      for (std::size_t i = 0; i < d; ++i) {
        dot += std::conj(m[i * d + prev]) * v[i];
      }
      for (std::size_t i = 0; i < d; ++i) v[i] -= dot * m[i * d + prev];
    }
    double n2 = 0.0;
    for (const auto& x : v) n2 += std::norm(x);
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t i = 0; i < d; ++i) m[i * d + col] = v[i] * inv;
  }
  return m;
}

double max_abs_diff(std::span<const cxd> a, std::span<const cxd> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct Ctx {
  std::mt19937_64 rng;
  std::vector<CheckResult> results;

  void check(const std::string& name, bool pass, double residual) {
    std::ostringstream ss;
    ss << "residual " << residual;
    results.push_back({name, pass, ss.str()});
  }
  void check(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  }
};

StateVector make_state(const RegisterLayout& layout,
                       std::span<const cxd> amps) {
  StateVector st = StateVector::allocate(layout);
  std::copy(amps.begin(), amps.end(), st.amplitudes().begin());
  return st;
}

constexpr double kTol = 1e-10;

void check_hadamard_and_qft(Ctx& ctx) {
  const RegisterLayout layout{{"p", 2}, {"q", 1}, {"r", 3}};
  for (const auto& r : layout.registers()) {
    const auto ref = random_unit_state(layout.dim(), ctx.rng);

    StateVector st = make_state(layout, ref);
    st.apply_hadamard_all(r.name);
    const Matrix dense =
        embed_register_op(layout, r, hadamard_matrix(r.qubits));
    double resid = max_abs_diff(st.amplitudes(), matvec(dense, ref));
    ctx.check("hadamard_all[" + r.name + "] vs dense", resid <= kTol, resid);

    for (const bool inverse : {false, true}) {
      StateVector sq = make_state(layout, ref);
      sq.apply_qft(r.name, inverse);
      const Matrix qd = embed_register_op(
          layout, r, dft_matrix(r.dim(), inverse ? -1 : +1));
      resid = max_abs_diff(sq.amplitudes(), matvec(qd, ref));
      ctx.check(std::string("qft") + (inverse ? "_inverse" : "") + "[" +
                    r.name + "] vs dense",
                resid <= kTol, resid);
    }

    // forward then inverse is the identity
    StateVector si = make_state(layout, ref);
    si.apply_qft(r.name);
    si.apply_qft(r.name, true);
    resid = max_abs_diff(si.amplitudes(), ref);
    ctx.check("qft roundtrip[" + r.name + "]", resid <= 1e-12, resid);
  }
}

void check_reflections(Ctx& ctx) {
  const RegisterLayout layout{{"p", 2}, {"q", 1}, {"r", 3}};
  const std::uint64_t dim = layout.dim();
  const auto ref = random_unit_state(dim, ctx.rng);

  {  // reflect_zero on {p, r}, with and without a mask on q
    for (const IndexMask mask :
         {IndexMask{}, IndexMask{layout.reg("q").index_mask(),
                                 layout.reg("q").index_mask()}}) {
      StateVector st = make_state(layout, ref);
      st.reflect_zero({"p", "r"}, mask);
      std::vector<cxd> expect(ref.begin(), ref.end());
      for (std::uint64_t g = 0; g < dim; ++g) {
        if (layout.digit(g, "p") == 0 && layout.digit(g, "r") == 0 &&
            mask.contains(g)) {
          expect[g] = -expect[g];
        }
      }
      const double resid = max_abs_diff(st.amplitudes(), expect);
      ctx.check(mask.all() ? "reflect_zero vs dense diagonal"
                           : "reflect_zero masked vs dense diagonal",
                resid <= kTol, resid);
    }
  }

  {  // reflect_predicate: pseudo-random predicate, involution
    const auto pred = [](const BasisAssignment& b) {
      return ((b["p"] * 5 + b["q"] * 3 + b["r"]) % 7) < 3;
    };
    StateVector st = make_state(layout, ref);
    st.reflect_predicate(pred);
    std::vector<cxd> expect(ref.begin(), ref.end());
    std::vector<std::uint64_t> digits(3);
    for (std::uint64_t g = 0; g < dim; ++g) {
      layout.digits_of(g, digits);
      if (pred(BasisAssignment(layout, digits))) expect[g] = -expect[g];
    }
    double resid = max_abs_diff(st.amplitudes(), expect);
    ctx.check("reflect_predicate vs dense diagonal", resid <= kTol, resid);

    st.reflect_predicate(pred);
    resid = max_abs_diff(st.amplitudes(), ref);
    ctx.check("reflect_predicate involution", resid <= 1e-12, resid);
  }
}

void check_difference_condition(Ctx& ctx) {
  // 1D condition on equal-width registers, trailing readout register
  {
    const RegisterLayout layout{{"var", 1}, {"A", 1}, {"B", 1}, {"cor", 2}};
    const auto ref = random_unit_state(layout.dim(), ctx.rng);
    const IndexMask mask{layout.reg("cor").index_mask() & 0b10ULL, 0b10ULL};
    for (const IndexMask m : {IndexMask{}, mask}) {
      StateVector fast = make_state(layout, ref);
      fast.reflect_difference_condition("A", "B", "var", 1, m);
      StateVector slow = make_state(layout, ref);
      slow.reflect_predicate(
          [](const BasisAssignment& b) {
            return ((b["A"] + 2 - b["B"]) % 2) == b["var"];
          },
          m);
      const double resid = max_abs_diff(fast.amplitudes(), slow.amplitudes());
      ctx.check(m.all() ? "difference condition vs predicate"
                        : "difference condition masked vs predicate",
                resid <= kTol, resid);
    }
  }
  // 2-component condition (rows and columns)
  {
    const RegisterLayout layout{{"templ", 2}, {"C1", 2}, {"C2", 2}};
    const auto ref = random_unit_state(layout.dim(), ctx.rng);
    StateVector fast = make_state(layout, ref);
    fast.reflect_difference_condition("C1", "templ", "C2", 2);
    StateVector slow = make_state(layout, ref);
    slow.reflect_predicate([](const BasisAssignment& b) {
      const auto row = [](std::uint64_t d) { return d >> 1; };
      const auto col = [](std::uint64_t d) { return d & 1; };
      return ((row(b["C1"]) + 2 - row(b["templ"])) % 2) == row(b["C2"]) &&
             ((col(b["C1"]) + 2 - col(b["templ"])) % 2) == col(b["C2"]);
    });
    const double resid = max_abs_diff(fast.amplitudes(), slow.amplitudes());
    ctx.check("2D difference condition vs predicate", resid <= kTol, resid);
  }
}

void check_product_reflection(Ctx& ctx) {
  const RegisterLayout layout{{"x", 2}, {"y", 2}, {"z", 2}};
  const std::uint64_t dim = layout.dim();

  const auto dense_reflection = [&](std::span<const ProductFactor> factors,
                                    double sigma, IndexMask mask) {
    // psi over the listed registers, identity elsewhere; the masked
    // complement stays untouched.
    std::vector<cxd> psi(1, cxd{1.0, 0.0});
    std::uint64_t listed_mask = 0;
    std::vector<const ProductFactor*> ordered;
    for (const auto& r : layout.registers()) {
      for (const auto& f : factors) {
        if (f.register_name == r.name) ordered.push_back(&f);
      }
    }
    for (const auto* f : ordered) {
      listed_mask |= layout.reg(f->register_name).index_mask();
      std::vector<cxd> next(psi.size() * f->amplitudes.size());
      for (std::size_t i = 0; i < psi.size(); ++i) {
        for (std::size_t j = 0; j < f->amplitudes.size(); ++j) {
          next[i * f->amplitudes.size() + j] = psi[i] * f->amplitudes[j];
        }
      }
      psi = std::move(next);
    }
    const auto listed_index = [&](std::uint64_t g) {
      std::uint64_t idx = 0;
      for (const auto* f : ordered) {
        const Register& r = layout.reg(f->register_name);
        idx = (idx << r.qubits) | layout.digit(g, r);
      }
      return idx;
    };
    Matrix m(dim * dim, cxd{0.0, 0.0});
    for (std::uint64_t g = 0; g < dim; ++g) {
      for (std::uint64_t h = 0; h < dim; ++h) {
        const bool same_rest = (g & ~listed_mask) == (h & ~listed_mask);
        cxd v{0.0, 0.0};
        if (mask.contains(g) && mask.contains(h) && same_rest) {
          v = sigma * 2.0 * psi[listed_index(g)] *
              std::conj(psi[listed_index(h)]);
          if (g == h) v -= sigma;
        } else if (g == h) {
          v = 1.0;
        }
        m[g * dim + h] = v;
      }
    }
    return m;
  };

  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 4; ++trial) {
    const bool use_complex = trial % 2 == 1;
    const bool contiguous = trial < 2;
    std::vector<ProductFactor> factors;
    if (contiguous) {
      factors.push_back(
          use_complex
              ? ProductFactor{"x", random_unit_state(4, ctx.rng)}
              : ProductFactor::real("x", random_prob_amplitudes(4, ctx.rng)));
      factors.push_back(
          use_complex
              ? ProductFactor{"y", random_unit_state(4, ctx.rng)}
              : ProductFactor::real("y", random_prob_amplitudes(4, ctx.rng)));
    } else {
      factors.push_back(
          use_complex
              ? ProductFactor{"x", random_unit_state(4, ctx.rng)}
              : ProductFactor::real("x", random_prob_amplitudes(4, ctx.rng)));
      factors.push_back(
          use_complex
              ? ProductFactor{"z", random_unit_state(4, ctx.rng)}
              : ProductFactor::real("z", random_prob_amplitudes(4, ctx.rng)));
    }
    const IndexMask mask =
        coin(ctx.rng) != 0 && contiguous
            ? IndexMask{std::uint64_t{1} << 1, std::uint64_t{1} << 1}
            : IndexMask{};
    const auto ref = random_unit_state(dim, ctx.rng);
    for (const double sigma : {-1.0, +1.0}) {
      StateVector st = make_state(layout, ref);
      if (sigma < 0) {
        st.reflect_about_product_state(factors, mask);
      } else {
        st.diffuse_about_product_state(factors, mask);
      }
      const Matrix dense = dense_reflection(factors, sigma, mask);
      const double resid = max_abs_diff(st.amplitudes(), matvec(dense, ref));
      std::ostringstream name;
      name << (sigma < 0 ? "reflect" : "diffuse") << "_about_product["
           << (contiguous ? "contig" : "split") << ","
           << (use_complex ? "complex" : "real") << ","
           << (mask.all() ? "unmasked" : "masked") << "]";
      ctx.check(name.str(), resid <= kTol, resid);

      // applying the same reflection twice gives back the input
      if (sigma < 0) {
        st.reflect_about_product_state(factors, mask);
      } else {
        st.diffuse_about_product_state(factors, mask);
      }
      const double resid2 = max_abs_diff(st.amplitudes(), ref);
      ctx.check(name.str() + " involution", resid2 <= 1e-12, resid2);
    }
  }
}

void check_controlled_power(Ctx& ctx) {
  const RegisterLayout layout{{"work", 2}, {"ctl", 2}};
  const std::uint64_t dim = layout.dim();
  const Register& work = layout.reg("work");
  const Register& ctl = layout.reg("ctl");
  const Matrix u = random_unitary(4, ctx.rng);
  const auto ref = random_unit_state(dim, ctx.rng);

  // test-side masked application of a dense register-local unitary
  const auto masked_apply = [&](StateVector& st, IndexMask mask) {
    auto amps = st.amplitudes();
    std::vector<cxd> slice(work.dim());
    for (std::uint64_t rest = 0; rest < dim; ++rest) {
      if ((rest & work.index_mask()) != 0) continue;
      if (!mask.contains(rest)) continue;
      for (std::uint64_t d = 0; d < work.dim(); ++d) {
        slice[d] = amps[rest | (d << work.lsb)];
      }
      for (std::uint64_t d = 0; d < work.dim(); ++d) {
        cxd s{0.0, 0.0};
        for (std::uint64_t e = 0; e < work.dim(); ++e) {
          s += u[d * work.dim() + e] * slice[e];
        }
        amps[rest | (d << work.lsb)] = s;
      }
    }
  };

  StateVector st = make_state(layout, ref);
  const std::uint64_t calls = st.controlled_power("ctl", masked_apply);

  // dense: sum_m |m><m|_ctl (x) U^m_work
  Matrix dense(dim * dim, cxd{0.0, 0.0});
  Matrix upow = identity(work.dim());
  for (std::uint64_t m = 0; m < ctl.dim(); ++m) {
    for (std::uint64_t wd = 0; wd < work.dim(); ++wd) {
      for (std::uint64_t we = 0; we < work.dim(); ++we) {
        const std::uint64_t g = (wd << work.lsb) | (m << ctl.lsb);
        const std::uint64_t h = (we << work.lsb) | (m << ctl.lsb);
        dense[g * dim + h] = upow[wd * work.dim() + we];
      }
    }
    upow = matmul(upow, u, work.dim());
  }
  const double resid = max_abs_diff(st.amplitudes(), matvec(dense, ref));
  ctx.check("controlled_power vs dense block unitary", resid <= kTol, resid);
  ctx.check("controlled_power invocation counter",
            calls == ctl.dim() - 1,
            "calls = " + std::to_string(calls));
}

void check_readouts(Ctx& ctx) {
  const RegisterLayout layout{{"p", 2}, {"q", 2}, {"r", 2}};
  const auto ref = random_unit_state(layout.dim(), ctx.rng);
  StateVector st = make_state(layout, ref);

  const auto dist = st.conditional_distribution("q", {{"p", 2}});
  // brute-force recomputation with independent digit arithmetic
  std::vector<double> expect(4, 0.0);
  double weight = 0.0;
  for (std::uint64_t g = 0; g < layout.dim(); ++g) {
    if (((g >> 4) & 3) != 2) continue;
    const double pr = std::norm(ref[g]);
    expect[(g >> 2) & 3] += pr;
    weight += pr;
  }
  double resid = std::abs(weight - dist.total_weight);
  for (std::size_t i = 0; i < 4; ++i) {
    resid = std::max(resid, std::abs(expect[i] / weight -
                                     dist.probabilities[i]));
  }
  ctx.check("conditional_distribution vs brute force", resid <= kTol, resid);

  const auto s1 = st.sample_measurement({"p", "r"}, 1234, 64);
  const auto s2 = st.sample_measurement({"p", "r"}, 1234, 64);
  ctx.check("sample_measurement seed determinism", s1 == s2,
            "64 samples compared");
}

void check_kernel_equivalence(Ctx& ctx) {
  const auto& ks = kernels::scalar();
  const auto& ka = kernels::active();
  if (&ks == &ka) {
    ctx.check("kernel backends", true,
              std::string("active backend = ") + ka.name +
                  " (scalar only, nothing to compare)");
    return;
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 1037;  // odd on purpose: exercises the tails
  std::vector<double> a(n), b(n), a2(n), b2(n), acc(n, 0.0), acc2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = u(ctx.rng);
    b[i] = u(ctx.rng);
  }
  a2 = a;
  b2 = b;
  double resid = 0.0;
  const auto cmp = [&](const std::vector<double>& x,
                       const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      resid = std::max(resid, std::abs(x[i] - y[i]));
    }
  };
  ks.negate(a.data(), n);
  ka.negate(a2.data(), n);
  cmp(a, a2);
  ks.scale(a.data(), n, 0.7315);
  ka.scale(a2.data(), n, 0.7315);
  cmp(a, a2);
  ks.axpy(acc.data(), a.data(), n, 1.618);
  ka.axpy(acc2.data(), a2.data(), n, 1.618);
  cmp(acc, acc2);
  ks.axpby(b.data(), a.data(), n, 0.25, -1.0);
  ka.axpby(b2.data(), a2.data(), n, 0.25, -1.0);
  cmp(b, b2);
  ks.hadamard_pair(a.data(), b.data(), n);
  ka.hadamard_pair(a2.data(), b2.data(), n);
  cmp(a, a2);
  cmp(b, b2);
  const double s1 = ks.sum_squares(a.data(), n);
  const double s2 = ka.sum_squares(a2.data(), n);
  resid = std::max(resid, std::abs(s1 - s2) / std::max(1.0, std::abs(s1)));
  std::vector<double> n1(n / 2, 0.1), n2(n / 2, 0.1);
  ks.norm_accum(n1.data(), a.data(), n / 2);
  ka.norm_accum(n2.data(), a2.data(), n / 2);
  cmp(n1, n2);
  ctx.check(std::string("kernel equivalence scalar vs ") + ka.name,
            resid <= 1e-13, resid);
}

}  // namespace

std::vector<CheckResult> run_all(std::uint64_t seed) {
  Ctx ctx{std::mt19937_64(seed ^ 0x5eeded5eeded5eedULL), {}};
  check_hadamard_and_qft(ctx);
  check_reflections(ctx);
  check_difference_condition(ctx);
  check_product_reflection(ctx);
  check_controlled_power(ctx);
  check_readouts(ctx);
  check_kernel_equivalence(ctx);
  return std::move(ctx.results);
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

}  // namespace qcorr::selftest
