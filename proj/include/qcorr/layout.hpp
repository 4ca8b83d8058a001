#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcorr {

// A named block of qubits inside a register layout. Since every register
// dimension is a power of two, each register occupies the contiguous bit
// field [lsb, lsb + qubits) of the global basis index.
struct Register {
  std::string name;
  unsigned qubits = 0;
  unsigned lsb = 0;

  std::uint64_t dim() const { return std::uint64_t{1} << qubits; }
  std::uint64_t index_mask() const { return (dim() - 1) << lsb; }
};

// Ordered collection of named qubit registers.
//
// Basis-index convention: the global index decomposes as mixed-radix digits
// in declaration order, with the FIRST-declared register as the most
// significant digit block. For layout {var:2, A:2, B:2, cor:3},
//   g = ((var * 4 + A) * 4 + B) * 8 + cor
// so `cor` occupies bits [0,3) and `var` bits [7,9). Within a register the
// digit is the usual unsigned binary value of its qubits.
class RegisterLayout {
 public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<std::pair<std::string, unsigned>> regs);
  RegisterLayout(std::initializer_list<std::pair<std::string, unsigned>> regs)
      : RegisterLayout(std::vector<std::pair<std::string, unsigned>>(regs)) {}

  unsigned total_qubits() const { return total_; }
  std::uint64_t dim() const { return std::uint64_t{1} << total_; }

  const std::vector<Register>& registers() const { return regs_; }
  bool has(std::string_view name) const;
  // Throws std::invalid_argument for unknown names.
  const Register& reg(std::string_view name) const;
  std::size_t position(std::string_view name) const;

  std::uint64_t digit(std::uint64_t g, const Register& r) const {
    return (g >> r.lsb) & (r.dim() - 1);
  }
  std::uint64_t digit(std::uint64_t g, std::string_view name) const {
    return digit(g, reg(name));
  }

  // Packs per-register digits (declaration order) into a global index.
  std::uint64_t index_of(std::span<const std::uint64_t> digits) const;

  // Fills `out` (size >= registers().size()) with the digits of g.
  void digits_of(std::uint64_t g, std::span<std::uint64_t> out) const;

  bool operator==(const RegisterLayout&) const = default;

 private:
  std::vector<Register> regs_;
  unsigned total_ = 0;
};

}  // namespace qcorr
