#include "qcorr/state.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "qcorr/kernels.hpp"

namespace qcorr {
namespace {

constexpr double kUnitNormTol = 1e-10;
// Squared amplitude mass tolerated outside the |0> support of a register
// that is about to receive an injection.
constexpr double kOffSupportTol = 1e-20;

double* as_doubles(cxd* p) { return reinterpret_cast<double*>(p); }
const double* as_doubles(const cxd* p) {
  return reinterpret_cast<const double*>(p);
}

// Calls f(start, len) for every maximal aligned run of indices in [0, dim)
// satisfying (g & bits) == want. bits must be confined to [0, dim).
template <class F>
void for_each_masked_run(std::uint64_t dim, std::uint64_t bits,
                         std::uint64_t want, F&& f) {
  if ((want & ~bits) != 0) return;  // unsatisfiable selection
  if (bits == 0) {
    f(std::uint64_t{0}, dim);
    return;
  }
  const std::uint64_t run = bits & (~bits + 1);
  for (std::uint64_t start = 0; start < dim; start += run) {
    if ((start & bits) == want) f(start, run);
  }
}

// Ascending enumeration of all submasks g of `space` (g & ~space == 0).
template <class F>
void for_each_lattice_point(std::uint64_t space, F&& f) {
  std::uint64_t g = 0;
  while (true) {
    f(g);
    if (g == space) break;
    g = ((g | ~space) + 1) & space;
  }
}

double factor_norm(std::span<const cxd> a) {
  double s = 0.0;
  for (const cxd& v : a) s += std::norm(v);
  return std::sqrt(s);
}

bool all_real(std::span<const cxd> a) {
  return std::all_of(a.begin(), a.end(),
                     [](const cxd& v) { return v.imag() == 0.0; });
}

// In-place power-of-two discrete Fourier transform with kernel
// e^{sign * 2*pi*i * jk / D} / sqrt(D). Twiddles and the bit-reversal table
// are precomputed once and shared across slices.
class Pow2Dft {
 public:
  Pow2Dft(unsigned log_d, int sign)
      : log_d_(log_d), d_(std::uint64_t{1} << log_d) {
    inv_sqrt_d_ = 1.0 / std::sqrt(static_cast<double>(d_));
    rev_.resize(d_);
    for (std::uint64_t i = 1; i < d_; ++i) {
      rev_[i] = (rev_[i >> 1] >> 1) | ((i & 1) << (log_d_ - 1));
    }
    stage_tw_.resize(log_d_);
    for (unsigned s = 0; s < log_d_; ++s) {
      const std::uint64_t len = std::uint64_t{2} << s;
      stage_tw_[s].resize(len / 2);
      for (std::uint64_t k = 0; k < len / 2; ++k) {
        stage_tw_[s][k] = std::polar(
            1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(len));
      }
    }
  }

  void operator()(cxd* a) const {
    for (std::uint64_t i = 1; i < d_; ++i) {
      if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
    }
    for (unsigned s = 0; s < log_d_; ++s) {
      const std::uint64_t len = std::uint64_t{2} << s;
      const auto& tw = stage_tw_[s];
      for (std::uint64_t base = 0; base < d_; base += len) {
        for (std::uint64_t k = 0; k < len / 2; ++k) {
          const cxd u = a[base + k];
          const cxd v = a[base + k + len / 2] * tw[k];
          a[base + k] = u + v;
          a[base + k + len / 2] = u - v;
        }
      }
    }
    kernels::active().scale(as_doubles(a), 2 * d_, inv_sqrt_d_);
  }

 private:
  unsigned log_d_;
  std::uint64_t d_;
  double inv_sqrt_d_;
  std::vector<std::uint32_t> rev_;
  std::vector<std::vector<cxd>> stage_tw_;
};

}  // namespace

unsigned qubit_cap() {
  if (const char* env = std::getenv("QCORR_MAX_QUBITS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 32) {
      return static_cast<unsigned>(v);
    }
  }
  return kDefaultQubitCap;
}

ProductFactor ProductFactor::real(std::string name,
                                  std::span<const double> a) {
  return ProductFactor{std::move(name), std::vector<cxd>(a.begin(), a.end())};
}

std::uint64_t ConditionalDistribution::argmax() const {
  if (probabilities.empty()) return 0;
  const auto it =
      std::max_element(probabilities.begin(), probabilities.end());
  return static_cast<std::uint64_t>(it - probabilities.begin());
}

StateVector::StateVector(RegisterLayout layout)
    : layout_(std::move(layout)), amps_(layout_.dim(), cxd{0.0, 0.0}) {
  amps_[0] = cxd{1.0, 0.0};
}

StateVector StateVector::allocate(RegisterLayout layout) {
  const unsigned cap = qubit_cap();
  if (layout.total_qubits() > cap) {
    throw std::runtime_error(
        "statevector of " + std::to_string(layout.total_qubits()) +
        " qubits exceeds the cap of " + std::to_string(cap) +
        " (set QCORR_MAX_QUBITS to raise it)");
  }
  return StateVector(std::move(layout));
}

double StateVector::norm() const {
  return std::sqrt(kernels::active().sum_squares(as_doubles(amps_.data()),
                                                 2 * amps_.size()));
}

void StateVector::debug_check_norm() const {
#ifndef NDEBUG
  assert(std::abs(norm() - 1.0) <= 1e-12);
#endif
}

void StateVector::inject_amplitudes(std::string_view reg,
                                    std::span<const double> amps) {
  inject_amplitudes(reg, std::vector<cxd>(amps.begin(), amps.end()));
}

void StateVector::inject_amplitudes(std::string_view reg,
                                    std::span<const cxd> amps) {
  const Register& r = layout_.reg(reg);
  if (amps.size() != r.dim()) {
    throw std::invalid_argument("amplitude vector for register '" +
                                std::string(reg) + "' has length " +
                                std::to_string(amps.size()) + ", expected " +
                                std::to_string(r.dim()));
  }
  if (std::abs(factor_norm(amps) - 1.0) > kUnitNormTol) {
    throw std::invalid_argument("amplitude vector for register '" +
                                std::string(reg) + "' is not unit-norm");
  }
  double off_support = 0.0;
  for (std::uint64_t g = 0; g < dim(); ++g) {
    if (layout_.digit(g, r) != 0) off_support += std::norm(amps_[g]);
  }
  if (off_support > kOffSupportTol) {
    throw std::invalid_argument("register '" + std::string(reg) +
                                "' is not in |0>; inject_amplitudes is only "
                                "defined on a |0> register");
  }

  const std::uint64_t lo_count = std::uint64_t{1} << r.lsb;
  const std::uint64_t hi_count = dim() >> (r.lsb + r.qubits);
  for (std::uint64_t hi = 0; hi < hi_count; ++hi) {
    const std::uint64_t base_hi = hi << (r.lsb + r.qubits);
    // j descending so the digit-0 source row is consumed last
    for (std::uint64_t j = r.dim(); j-- > 0;) {
      const cxd w = amps[j];
      const std::uint64_t dst = base_hi | (j << r.lsb);
      for (std::uint64_t lo = 0; lo < lo_count; ++lo) {
        amps_[dst | lo] = amps_[base_hi | lo] * w;
      }
    }
  }
  debug_check_norm();
}

void StateVector::apply_hadamard_all(std::string_view reg) {
  const Register& r = layout_.reg(reg);
  const auto& k = kernels::active();
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  for (unsigned q = 0; q < r.qubits; ++q) {
    const unsigned p = r.lsb + q;
    const std::uint64_t h = std::uint64_t{1} << p;
    if (p == 0) {
      for (std::uint64_t g = 0; g < dim(); g += 2) {
        const cxd a = amps_[g];
        const cxd b = amps_[g + 1];
        amps_[g] = (a + b) * inv_sqrt2;
        amps_[g + 1] = (a - b) * inv_sqrt2;
      }
    } else {
      for (std::uint64_t base = 0; base < dim(); base += 2 * h) {
        k.hadamard_pair(as_doubles(amps_.data() + base),
                        as_doubles(amps_.data() + base + h), 2 * h);
      }
    }
  }
  debug_check_norm();
}

void StateVector::apply_qft(std::string_view reg, bool inverse) {
  const Register& r = layout_.reg(reg);
  const Pow2Dft dft(r.qubits, inverse ? -1 : +1);
  const std::uint64_t d = r.dim();
  if (r.lsb == 0) {
    for (std::uint64_t base = 0; base < dim(); base += d) {
      dft(amps_.data() + base);
    }
  } else {
    std::vector<cxd> scratch(d);
    const std::uint64_t stride = std::uint64_t{1} << r.lsb;
    const std::uint64_t hi_count = dim() >> (r.lsb + r.qubits);
    for (std::uint64_t hi = 0; hi < hi_count; ++hi) {
      const std::uint64_t base_hi = hi << (r.lsb + r.qubits);
      for (std::uint64_t lo = 0; lo < stride; ++lo) {
        const std::uint64_t base = base_hi | lo;
        for (std::uint64_t j = 0; j < d; ++j) {
          scratch[j] = amps_[base + j * stride];
        }
        dft(scratch.data());
        for (std::uint64_t j = 0; j < d; ++j) {
          amps_[base + j * stride] = scratch[j];
        }
      }
    }
  }
  debug_check_norm();
}

void StateVector::reflect_zero(std::span<const std::string_view> regs,
                               IndexMask mask) {
  std::uint64_t zmask = 0;
  for (const auto name : regs) zmask |= layout_.reg(name).index_mask();
  const std::uint64_t space = (dim() - 1) & ~zmask;
  for_each_lattice_point(space, [&](std::uint64_t g) {
    if (mask.contains(g)) amps_[g] = -amps_[g];
  });
  debug_check_norm();
}

void StateVector::reflect_predicate(const BasisPredicate& pred,
                                    IndexMask mask) {
  std::vector<std::uint64_t> digits(layout_.registers().size());
  for (std::uint64_t g = 0; g < dim(); ++g) {
    if (!mask.contains(g)) continue;
    layout_.digits_of(g, digits);
    if (pred(BasisAssignment(layout_, digits))) amps_[g] = -amps_[g];
  }
  debug_check_norm();
}

void StateVector::reflect_difference_condition(std::string_view minuend,
                                               std::string_view subtrahend,
                                               std::string_view result,
                                               unsigned parts,
                                               IndexMask mask) {
  const Register& rm = layout_.reg(minuend);
  const Register& rs = layout_.reg(subtrahend);
  const Register& rr = layout_.reg(result);
  if (rm.name == rs.name || rm.name == rr.name || rs.name == rr.name) {
    throw std::invalid_argument(
        "difference condition needs three distinct registers");
  }
  if (rm.qubits != rs.qubits || rm.qubits != rr.qubits) {
    throw std::invalid_argument(
        "difference condition needs equal-width registers");
  }
  if (parts == 0 || rm.qubits % parts != 0) {
    throw std::invalid_argument(
        "register width is not divisible into the requested components");
  }
  if ((mask.want & ~mask.bits) != 0) return;  // unsatisfiable selection
  const unsigned comp_width = rm.qubits / parts;
  const std::uint64_t comp_mask = (std::uint64_t{1} << comp_width) - 1;

  const std::uint64_t other_mask =
      (dim() - 1) & ~(rm.index_mask() | rs.index_mask() | rr.index_mask());
  const bool contiguous_low = (other_mask & (other_mask + 1)) == 0;
  const std::uint64_t fixed_mask_bits = mask.bits & ~other_mask;
  const auto& k = kernels::active();

  for (std::uint64_t rdig = 0; rdig < rr.dim(); ++rdig) {
    for (std::uint64_t sdig = 0; sdig < rs.dim(); ++sdig) {
      std::uint64_t mdig = 0;
      for (unsigned part = 0; part < parts; ++part) {
        const unsigned shift = part * comp_width;
        const std::uint64_t rc = (rdig >> shift) & comp_mask;
        const std::uint64_t sc = (sdig >> shift) & comp_mask;
        mdig |= ((rc + sc) & comp_mask) << shift;
      }
      const std::uint64_t fixed =
          (mdig << rm.lsb) | (sdig << rs.lsb) | (rdig << rr.lsb);
      if ((fixed & fixed_mask_bits) != (mask.want & fixed_mask_bits)) {
        continue;
      }
      if (contiguous_low) {
        for_each_masked_run(
            other_mask + 1, mask.bits & other_mask, mask.want & other_mask,
            [&](std::uint64_t start, std::uint64_t len) {
              k.negate(as_doubles(amps_.data() + fixed + start), 2 * len);
            });
      } else {
        for_each_lattice_point(other_mask, [&](std::uint64_t o) {
          const std::uint64_t g = fixed | o;
          if (mask.contains(g)) amps_[g] = -amps_[g];
        });
      }
    }
  }
  debug_check_norm();
}

void StateVector::reflect_about_product_state(
    std::span<const ProductFactor> factors, IndexMask mask) {
  product_reflection(factors, mask, -1.0);
}

void StateVector::diffuse_about_product_state(
    std::span<const ProductFactor> factors, IndexMask mask) {
  product_reflection(factors, mask, +1.0);
}

void StateVector::product_reflection(std::span<const ProductFactor> factors,
                                     IndexMask mask, double sigma) {
  if (factors.empty()) {
    throw std::invalid_argument("product reflection needs >= 1 factor");
  }
  std::vector<std::size_t> positions;
  positions.reserve(factors.size());
  bool real_only = true;
  for (const auto& f : factors) {
    const Register& r = layout_.reg(f.register_name);
    if (f.amplitudes.size() != r.dim()) {
      throw std::invalid_argument("product factor for register '" +
                                  f.register_name + "' has length " +
                                  std::to_string(f.amplitudes.size()) +
                                  ", expected " + std::to_string(r.dim()));
    }
    if (std::abs(factor_norm(f.amplitudes) - 1.0) > kUnitNormTol) {
      throw std::invalid_argument("product factor for register '" +
                                  f.register_name + "' is not unit-norm");
    }
    positions.push_back(layout_.position(f.register_name));
    real_only = real_only && all_real(f.amplitudes);
  }
  std::vector<std::size_t> order(factors.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return positions[a] < positions[b];
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (positions[order[i]] == positions[order[i - 1]]) {
      throw std::invalid_argument("duplicate product factor register");
    }
  }
  bool contiguous = true;
  for (std::size_t i = 1; i < order.size(); ++i) {
    contiguous =
        contiguous && positions[order[i]] == positions[order[i - 1]] + 1;
  }

  std::uint64_t listed_mask = 0;
  for (const auto& f : factors) {
    listed_mask |= layout_.reg(f.register_name).index_mask();
  }
  if ((mask.bits & listed_mask) != 0) {
    // A mask cutting through the reflected registers would not restrict to
    // an invariant subspace; the result would not be unitary.
    throw std::invalid_argument(
        "mask overlaps the product-reflection registers");
  }
  if ((mask.want & ~mask.bits) != 0) return;  // unsatisfiable selection

  if (!contiguous || !real_only) {
    product_reflection_generic(factors, mask, sigma);
    return;
  }

  // Fast path: the listed registers form one contiguous digit block, all
  // factors are real, and the mask only constrains bits outside the block.
  // Memory decomposes as [lead][listed][trail] with the trail contiguous,
  // so both passes stream the trail dimension through the kernels.
  const Register& last = layout_.registers()[positions[order.back()]];
  const unsigned t_bits = last.lsb;
  unsigned p_bits = 0;
  for (const auto& f : factors) p_bits += layout_.reg(f.register_name).qubits;
  const std::uint64_t t_dim = std::uint64_t{1} << t_bits;
  const std::uint64_t p_dim = std::uint64_t{1} << p_bits;
  const std::uint64_t lead_count = dim() >> (t_bits + p_bits);

  // psi = kron of the factors in declaration order (first factor = most
  // significant digits of the block index).
  std::vector<double> psi{1.0};
  for (const std::size_t oi : order) {
    const auto& f = factors[oi];
    std::vector<double> next(psi.size() * f.amplitudes.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
      for (std::size_t j = 0; j < f.amplitudes.size(); ++j) {
        next[i * f.amplitudes.size() + j] = psi[i] * f.amplitudes[j].real();
      }
    }
    psi = std::move(next);
  }

  const std::uint64_t t_mask_bits = mask.bits & (t_dim - 1);
  const std::uint64_t t_mask_want = mask.want & (t_dim - 1);
  const std::uint64_t lead_bits = mask.bits >> (t_bits + p_bits);
  const std::uint64_t lead_want = mask.want >> (t_bits + p_bits);

  const auto& k = kernels::active();
  std::vector<double> inner(2 * t_dim);
  for (std::uint64_t lead = 0; lead < lead_count; ++lead) {
    if ((lead & lead_bits) != lead_want) continue;
    cxd* block = amps_.data() + (lead << (p_bits + t_bits));

    for_each_masked_run(t_dim, t_mask_bits, t_mask_want,
                        [&](std::uint64_t t0, std::uint64_t len) {
                          std::fill(inner.begin() + 2 * t0,
                                    inner.begin() + 2 * (t0 + len), 0.0);
                        });
    for (std::uint64_t p = 0; p < p_dim; ++p) {
      const double w = psi[p];
      if (w == 0.0) continue;
      const double* row = as_doubles(block + (p << t_bits));
      for_each_masked_run(t_dim, t_mask_bits, t_mask_want,
                          [&](std::uint64_t t0, std::uint64_t len) {
                            k.axpy(inner.data() + 2 * t0, row + 2 * t0,
                                   2 * len, w);
                          });
    }
    for (std::uint64_t p = 0; p < p_dim; ++p) {
      const double w = psi[p];
      double* row = as_doubles(block + (p << t_bits));
      if (w == 0.0) {
        if (sigma > 0.0) {
          for_each_masked_run(t_dim, t_mask_bits, t_mask_want,
                              [&](std::uint64_t t0, std::uint64_t len) {
                                k.negate(row + 2 * t0, 2 * len);
                              });
        }
        continue;
      }
      for_each_masked_run(t_dim, t_mask_bits, t_mask_want,
                          [&](std::uint64_t t0, std::uint64_t len) {
                            k.axpby(row + 2 * t0, inner.data() + 2 * t0,
                                    2 * len, 2.0 * sigma * w, -sigma);
                          });
    }
  }
  debug_check_norm();
}

void StateVector::product_reflection_generic(
    std::span<const ProductFactor> factors, IndexMask mask, double sigma) {
  // Reference path: arbitrary register subsets, complex factors, arbitrary
  // masks. Two passes with per-index digit arithmetic.
  struct Field {
    unsigned lsb;
    unsigned qubits;
  };
  std::vector<Field> listed;
  std::uint64_t listed_mask = 0;
  std::vector<cxd> psi{cxd{1.0, 0.0}};
  // Factors combined in declaration order so psi's index packs the listed
  // registers' digits most-significant-first.
  std::vector<const ProductFactor*> by_position;
  for (const auto& r : layout_.registers()) {
    for (const auto& f : factors) {
      if (f.register_name == r.name) by_position.push_back(&f);
    }
  }
  for (const ProductFactor* f : by_position) {
    const Register& r = layout_.reg(f->register_name);
    listed.push_back({r.lsb, r.qubits});
    listed_mask |= r.index_mask();
    std::vector<cxd> next(psi.size() * f->amplitudes.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
      for (std::size_t j = 0; j < f->amplitudes.size(); ++j) {
        next[i * f->amplitudes.size() + j] = psi[i] * f->amplitudes[j];
      }
    }
    psi = std::move(next);
  }
  std::vector<Field> others;
  unsigned other_bits = 0;
  for (const auto& r : layout_.registers()) {
    if ((r.index_mask() & listed_mask) == 0) {
      others.push_back({r.lsb, r.qubits});
      other_bits += r.qubits;
    }
  }
  const auto listed_index = [&](std::uint64_t g) {
    std::uint64_t idx = 0;
    for (const Field& f : listed) {
      idx = (idx << f.qubits) |
            ((g >> f.lsb) & ((std::uint64_t{1} << f.qubits) - 1));
    }
    return idx;
  };
  const auto other_index = [&](std::uint64_t g) {
    std::uint64_t idx = 0;
    for (const Field& f : others) {
      idx = (idx << f.qubits) |
            ((g >> f.lsb) & ((std::uint64_t{1} << f.qubits) - 1));
    }
    return idx;
  };

  std::vector<cxd> inner(std::uint64_t{1} << other_bits, cxd{0.0, 0.0});
  for (std::uint64_t g = 0; g < dim(); ++g) {
    if (!mask.contains(g)) continue;
    inner[other_index(g)] += std::conj(psi[listed_index(g)]) * amps_[g];
  }
  for (std::uint64_t g = 0; g < dim(); ++g) {
    if (!mask.contains(g)) continue;
    amps_[g] = sigma * (2.0 * psi[listed_index(g)] * inner[other_index(g)] -
                        amps_[g]);
  }
  debug_check_norm();
}

std::uint64_t StateVector::controlled_power(std::string_view control,
                                            const MaskedOp& op) {
  const Register& c = layout_.reg(control);
  std::uint64_t invocations = 0;
  for (unsigned k = 0; k < c.qubits; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << (c.lsb + k);
    const IndexMask m{bit, bit};
    const std::uint64_t reps = std::uint64_t{1} << k;
    for (std::uint64_t r = 0; r < reps; ++r) {
      op(*this, m);
      ++invocations;
    }
  }
  return invocations;
}

ConditionalDistribution StateVector::conditional_distribution(
    std::string_view target,
    std::initializer_list<std::pair<std::string, std::uint64_t>> given)
    const {
  const std::vector<std::pair<std::string, std::uint64_t>> g(given);
  return conditional_distribution(target, std::span(g));
}

ConditionalDistribution StateVector::conditional_distribution(
    std::string_view target,
    std::span<const std::pair<std::string, std::uint64_t>> given) const {
  const Register& t = layout_.reg(target);
  IndexMask cond;
  for (const auto& [name, value] : given) {
    const Register& r = layout_.reg(name);
    if (r.name == t.name) {
      throw std::invalid_argument(
          "conditioning register '" + r.name + "' overlaps the target");
    }
    if ((cond.bits & r.index_mask()) != 0) {
      throw std::invalid_argument("duplicate conditioning register '" +
                                  r.name + "'");
    }
    if (value >= r.dim()) {
      throw std::invalid_argument("conditioning value out of range for '" +
                                  r.name + "'");
    }
    cond.bits |= r.index_mask();
    cond.want |= value << r.lsb;
  }

  ConditionalDistribution out;
  out.given.assign(given.begin(), given.end());
  out.target = t.name;
  out.probabilities.assign(t.dim(), 0.0);
  for (std::uint64_t g = 0; g < dim(); ++g) {
    if (!cond.contains(g)) continue;
    out.probabilities[layout_.digit(g, t)] += std::norm(amps_[g]);
  }
  double weight = 0.0;
  for (const double p : out.probabilities) weight += p;
  out.total_weight = weight;
  if (weight > 0.0) {
    for (double& p : out.probabilities) p /= weight;
  } else {
    std::fill(out.probabilities.begin(), out.probabilities.end(), 0.0);
  }
  return out;
}

std::vector<double> StateVector::joint_probability_table(
    std::span<const std::string_view> regs) const {
  struct Field {
    unsigned lsb;
    unsigned qubits;
  };
  std::vector<Field> fields;
  unsigned bits = 0;
  std::uint64_t seen = 0;
  for (const auto name : regs) {
    const Register& r = layout_.reg(name);
    if ((seen & r.index_mask()) != 0) {
      throw std::invalid_argument("duplicate register '" + r.name +
                                  "' in joint table");
    }
    seen |= r.index_mask();
    fields.push_back({r.lsb, r.qubits});
    bits += r.qubits;
  }
  std::vector<double> table(std::uint64_t{1} << bits, 0.0);
  for (std::uint64_t g = 0; g < dim(); ++g) {
    std::uint64_t idx = 0;
    for (const Field& f : fields) {
      idx = (idx << f.qubits) |
            ((g >> f.lsb) & ((std::uint64_t{1} << f.qubits) - 1));
    }
    table[idx] += std::norm(amps_[g]);
  }
  return table;
}

std::vector<std::uint64_t> StateVector::sample_measurement(
    std::span<const std::string_view> regs, std::uint64_t seed,
    std::uint64_t shots) const {
  if (shots == 0) throw std::invalid_argument("shots must be >= 1");
  const std::vector<double> table = joint_probability_table(regs);
  std::vector<double> cdf(table.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    acc += table[i];
    cdf[i] = acc;
  }
  std::mt19937_64 eng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(shots);
  for (std::uint64_t s = 0; s < shots; ++s) {
    // 53-bit uniform in [0,1); avoids distribution-object portability traps
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53 * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx =
        std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()),
                              cdf.size() - 1);
    out.push_back(idx);
  }
  return out;
}

}  // namespace qcorr
