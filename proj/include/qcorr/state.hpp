#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcorr/layout.hpp"

namespace qcorr {

using cxd = std::complex<double>;

// Qubit budget for statevector allocation; QCORR_MAX_QUBITS overrides.
inline constexpr unsigned kDefaultQubitCap = 26;
unsigned qubit_cap();

// Restricts an operation to basis states with (g & bits) == want. The
// default-constructed mask selects everything.
struct IndexMask {
  std::uint64_t bits = 0;
  std::uint64_t want = 0;

  bool contains(std::uint64_t g) const { return (g & bits) == want; }
  bool all() const { return bits == 0; }
};

// Digit view of one basis state, handed to reflect_predicate callbacks.
class BasisAssignment {
 public:
  BasisAssignment(const RegisterLayout& l, std::span<const std::uint64_t> d)
      : layout_(&l), digits_(d) {}

  std::uint64_t operator[](std::string_view name) const {
    return digits_[layout_->position(name)];
  }
  std::uint64_t digit(std::size_t position) const { return digits_[position]; }
  const RegisterLayout& layout() const { return *layout_; }

 private:
  const RegisterLayout* layout_;
  std::span<const std::uint64_t> digits_;
};

using BasisPredicate = std::function<bool(const BasisAssignment&)>;

// One tensor factor of a product state, aligned with a named register.
struct ProductFactor {
  std::string register_name;
  std::vector<cxd> amplitudes;

  static ProductFactor real(std::string name, std::span<const double> a);
};

// Exact Born distribution of one register conditioned on fixed values of
// other registers. total_weight == 0 flags an impossible conditioning event.
struct ConditionalDistribution {
  std::vector<std::pair<std::string, std::uint64_t>> given;
  std::string target;
  std::vector<double> probabilities;
  double total_weight = 0.0;

  bool empty() const { return total_weight == 0.0; }
  // Lowest index wins ties; 0 for the empty distribution.
  std::uint64_t argmax() const;
};

// Register-structured statevector with matrix-free unitary primitives.
//
// All mutating operations below are unitary on the masked subspace and
// preserve the L2 norm to 1e-12; in debug builds this is asserted after
// every call. A StateVector is not safe for concurrent mutation, but
// distinct instances may be used from different threads freely.
class StateVector {
 public:
  // Returns |0...0>. Throws std::runtime_error when the layout exceeds the
  // qubit cap (names the requested count), std::bad_alloc when memory runs
  // out anyway.
  static StateVector allocate(RegisterLayout layout);

  const RegisterLayout& layout() const { return layout_; }
  std::uint64_t dim() const { return amps_.size(); }
  std::span<cxd> amplitudes() { return amps_; }
  std::span<const cxd> amplitudes() const { return amps_; }
  cxd amplitude(std::uint64_t g) const { return amps_.at(g); }
  double norm() const;

  // Loads sum_j amps[j] |j> into a register currently in |0> (the state must
  // be a product of |0> on this register with the rest); amps must be
  // unit-norm within 1e-10.
  void inject_amplitudes(std::string_view reg, std::span<const cxd> amps);
  void inject_amplitudes(std::string_view reg, std::span<const double> amps);

  // H on every qubit of the register.
  void apply_hadamard_all(std::string_view reg);

  // Register-local Fourier transform with kernel e^{+2*pi*i*jk/D}/sqrt(D)
  // (conjugate kernel when inverse). forward o inverse == identity.
  void apply_qft(std::string_view reg, bool inverse = false);

  // Phase flip of basis states whose listed registers are all zero.
  void reflect_zero(std::span<const std::string_view> regs,
                    IndexMask mask = {});
  void reflect_zero(std::initializer_list<std::string_view> regs,
                    IndexMask mask = {}) {
    reflect_zero(std::span<const std::string_view>(regs.begin(), regs.size()),
                 mask);
  }

  // Phase flip exactly where the predicate holds. Reference path: evaluates
  // the callback per basis state; the difference-condition flip below is the
  // fast equivalent for the modular-index conditions.
  void reflect_predicate(const BasisPredicate& pred, IndexMask mask = {});

  // Sign-flips basis states where, for each of `parts` equal-width index
  // components, digit(minuend) - digit(subtrahend) == digit(result) modulo
  // the component dimension. The three registers need equal qubit counts.
  void reflect_difference_condition(std::string_view minuend,
                                    std::string_view subtrahend,
                                    std::string_view result,
                                    unsigned parts = 1, IndexMask mask = {});

  // I - 2|psi><psi| on the listed registers (psi = tensor product of the
  // factors), identity elsewhere.
  void reflect_about_product_state(std::span<const ProductFactor> factors,
                                   IndexMask mask = {});
  // 2|psi><psi| - I, the amplitude-amplification diffusion about psi.
  void diffuse_about_product_state(std::span<const ProductFactor> factors,
                                   IndexMask mask = {});

  // Applies op m times to the slice where the control register holds m,
  // realized per control qubit k as 2^k masked applications. Returns the
  // total number of single-op invocations (= control dim - 1). The op must
  // act only on registers disjoint from the control and honor the mask.
  using MaskedOp = std::function<void(StateVector&, IndexMask)>;
  std::uint64_t controlled_power(std::string_view control, const MaskedOp& op);

  ConditionalDistribution conditional_distribution(
      std::string_view target,
      std::span<const std::pair<std::string, std::uint64_t>> given) const;
  ConditionalDistribution conditional_distribution(
      std::string_view target,
      std::initializer_list<std::pair<std::string, std::uint64_t>> given = {})
      const;

  // Born probabilities of the listed registers jointly; index packs the
  // digits in listed order, first register most significant.
  std::vector<double> joint_probability_table(
      std::span<const std::string_view> regs) const;
  std::vector<double> joint_probability_table(
      std::initializer_list<std::string_view> regs) const {
    return joint_probability_table(
        std::span<const std::string_view>(regs.begin(), regs.size()));
  }

  // i.i.d. Born samples of the listed registers, packed like the table
  // above. Bit-reproducible for a fixed seed.
  std::vector<std::uint64_t> sample_measurement(
      std::span<const std::string_view> regs, std::uint64_t seed,
      std::uint64_t shots) const;
  std::vector<std::uint64_t> sample_measurement(
      std::initializer_list<std::string_view> regs, std::uint64_t seed,
      std::uint64_t shots) const {
    return sample_measurement(
        std::span<const std::string_view>(regs.begin(), regs.size()), seed,
        shots);
  }

 private:
  explicit StateVector(RegisterLayout layout);

  void product_reflection(std::span<const ProductFactor> factors,
                          IndexMask mask, double sigma);
  void product_reflection_generic(std::span<const ProductFactor> factors,
                                  IndexMask mask, double sigma);
  void debug_check_norm() const;

  RegisterLayout layout_;
  std::vector<cxd> amps_;
};

}  // namespace qcorr
