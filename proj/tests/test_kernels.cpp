#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qcorr/kernels.hpp"

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

// FMA contraction may shift the SIMD results by ~1 ulp against the scalar
// reference; anything beyond that is a bug.
constexpr double kElemTol = 1e-14;

}  // namespace

TEST_CASE("scalar kernels match direct formulas") {
  const auto& k = qcorr::kernels::scalar();
  std::vector<double> x{1.0, -2.0, 3.5};
  k.negate(x.data(), x.size());
  CHECK(x == std::vector<double>{-1.0, 2.0, -3.5});
  k.scale(x.data(), x.size(), 2.0);
  CHECK(x == std::vector<double>{-2.0, 4.0, -7.0});

  std::vector<double> acc{1.0, 1.0, 1.0};
  k.axpy(acc.data(), x.data(), x.size(), 0.5);
  CHECK(acc == std::vector<double>{0.0, 3.0, -2.5});

  std::vector<double> s{1.0, 2.0};
  const std::vector<double> y{3.0, 4.0};
  k.axpby(s.data(), y.data(), s.size(), 2.0, -1.0);  // s = 2y - s
  CHECK(s == std::vector<double>{5.0, 6.0});

  std::vector<double> a{1.0, 0.0};
  std::vector<double> b{0.0, 1.0};
  k.hadamard_pair(a.data(), b.data(), 2);
  const double c = 1.0 / std::sqrt(2.0);
  CHECK(a[0] == doctest::Approx(c).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(c).epsilon(1e-15));
  CHECK(b[0] == doctest::Approx(c).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(-c).epsilon(1e-15));

  CHECK(k.sum_squares(y.data(), 2) == doctest::Approx(25.0));

  std::vector<double> out{0.5};
  const std::vector<double> z{3.0, 4.0};  // one complex value 3+4i
  k.norm_accum(out.data(), z.data(), 1);
  CHECK(out[0] == doctest::Approx(25.5));
}

TEST_CASE("sum_squares stays accurate on large inputs") {
  const auto& k = qcorr::kernels::scalar();
  const std::size_t n = 1 << 20;
  std::vector<double> v(n, 1e-3);
  const double got = k.sum_squares(v.data(), n);
  const double expect = 1e-6 * static_cast<double>(n);
  CHECK(std::abs(got - expect) / expect < 1e-13);
}

TEST_CASE("active backend matches the scalar reference") {
  const auto& ks = qcorr::kernels::scalar();
  const auto& ka = qcorr::kernels::active();
  INFO("active backend: ", ka.name);

  std::mt19937_64 rng(7);
  // Odd sizes exercise the vector tails.
  for (const std::size_t n : {1ul, 2ul, 5ul, 64ul, 257ul, 4096ul, 10241ul}) {
    auto a1 = random_vec(n, rng);
    auto a2 = a1;
    ks.negate(a1.data(), n);
    ka.negate(a2.data(), n);
    CHECK(max_diff(a1, a2) == 0.0);

    ks.scale(a1.data(), n, 1.7);
    ka.scale(a2.data(), n, 1.7);
    CHECK(max_diff(a1, a2) == 0.0);

    auto acc1 = random_vec(n, rng);
    auto acc2 = acc1;
    ks.axpy(acc1.data(), a1.data(), n, -0.37);
    ka.axpy(acc2.data(), a2.data(), n, -0.37);
    CHECK(max_diff(acc1, acc2) <= kElemTol);

    ks.axpby(acc1.data(), a1.data(), n, 1.25, -1.0);
    ka.axpby(acc2.data(), a2.data(), n, 1.25, -1.0);
    CHECK(max_diff(acc1, acc2) <= kElemTol);

    auto b1 = random_vec(n, rng);
    auto b2 = b1;
    ks.hadamard_pair(a1.data(), b1.data(), n);
    ka.hadamard_pair(a2.data(), b2.data(), n);
    CHECK(max_diff(a1, a2) <= kElemTol);
    CHECK(max_diff(b1, b2) <= kElemTol);

    const double s1 = ks.sum_squares(a1.data(), n);
    const double s2 = ka.sum_squares(a2.data(), n);
    CHECK(std::abs(s1 - s2) <= 1e-13 * std::max(1.0, s1));

    if (n % 2 == 0) {
      auto o1 = random_vec(n / 2, rng);
      auto o2 = o1;
      ks.norm_accum(o1.data(), a1.data(), n / 2);
      ka.norm_accum(o2.data(), a2.data(), n / 2);
      CHECK(max_diff(o1, o2) <= kElemTol);
    }
  }
}

TEST_CASE("avx2 backend is exposed exactly when the CPU supports it") {
  const bool available = qcorr::kernels::avx2_available();
  CHECK((qcorr::kernels::avx2() != nullptr) == available);
}
