#include "qcorr/layout.hpp"

#include <stdexcept>
#include <unordered_set>

namespace qcorr {

RegisterLayout::RegisterLayout(
    std::vector<std::pair<std::string, unsigned>> regs) {
  if (regs.empty()) throw std::invalid_argument("layout needs >= 1 register");
  std::unordered_set<std::string> seen;
  for (const auto& [name, qubits] : regs) {
    if (name.empty()) throw std::invalid_argument("register name empty");
    if (qubits == 0) {
      throw std::invalid_argument("register '" + name + "' has 0 qubits");
    }
    if (!seen.insert(name).second) {
      throw std::invalid_argument("duplicate register name '" + name + "'");
    }
  }
  regs_.reserve(regs.size());
  for (auto& [name, qubits] : regs) {
    total_ += qubits;
    regs_.push_back(Register{std::move(name), qubits, 0});
  }
  if (total_ > 63) {
    throw std::invalid_argument("layout exceeds 63 addressable qubits");
  }
  // First-declared register is the most significant digit block.
  unsigned lsb = total_;
  for (auto& r : regs_) {
    lsb -= r.qubits;
    r.lsb = lsb;
  }
}

bool RegisterLayout::has(std::string_view name) const {
  for (const auto& r : regs_) {
    if (r.name == name) return true;
  }
  return false;
}

const Register& RegisterLayout::reg(std::string_view name) const {
  for (const auto& r : regs_) {
    if (r.name == name) return r;
  }
  throw std::invalid_argument("unknown register '" + std::string(name) + "'");
}

std::size_t RegisterLayout::position(std::string_view name) const {
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    if (regs_[i].name == name) return i;
  }
  throw std::invalid_argument("unknown register '" + std::string(name) + "'");
}

std::uint64_t RegisterLayout::index_of(
    std::span<const std::uint64_t> digits) const {
  if (digits.size() != regs_.size()) {
    throw std::invalid_argument("digit count does not match register count");
  }
  std::uint64_t g = 0;
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    if (digits[i] >= regs_[i].dim()) {
      throw std::invalid_argument("digit out of range for register '" +
                                  regs_[i].name + "'");
    }
    g |= digits[i] << regs_[i].lsb;
  }
  return g;
}

void RegisterLayout::digits_of(std::uint64_t g,
                               std::span<std::uint64_t> out) const {
  for (std::size_t i = 0; i < regs_.size(); ++i) out[i] = digit(g, regs_[i]);
}

}  // namespace qcorr
