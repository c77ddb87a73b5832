#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cghz {

enum class Polarization : std::uint8_t { H = 0, V = 1 };

inline constexpr char to_char(Polarization p) { return p == Polarization::H ? 'H' : 'V'; }

inline constexpr Polarization flip(Polarization p) {
  return p == Polarization::H ? Polarization::V : Polarization::H;
}

inline constexpr std::size_t kMaxQubits = 64;

inline constexpr std::uint64_t low_mask(std::size_t n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

inline constexpr bool bit_of(std::uint64_t bits, std::size_t i) { return (bits >> i) & 1u; }

// Computational-basis label of n polarization qubits. Qubit 0 is the least
// significant bit; H maps to 0 and V to 1.
class PatternLabel {
 public:
  PatternLabel(std::size_t n, std::uint64_t bits) : n_(n), bits_(bits) {
    if (n == 0 || n > kMaxQubits) {
      throw std::invalid_argument("PatternLabel: qubit count must be in [1, 64]");
    }
    if ((bits & ~low_mask(n)) != 0) {
      throw std::invalid_argument("PatternLabel: bits set beyond qubit count");
    }
  }

  // Parses a string of 'H'/'V' characters, qubit 0 first.
  static PatternLabel parse(std::string_view text) {
    if (text.empty() || text.size() > kMaxQubits) {
      throw std::invalid_argument("PatternLabel: pattern length must be in [1, 64]");
    }
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == 'V') {
        bits |= std::uint64_t{1} << i;
      } else if (text[i] != 'H') {
        throw std::invalid_argument("PatternLabel: expected only 'H' or 'V'");
      }
    }
    return {text.size(), bits};
  }

  static PatternLabel all(std::size_t n, Polarization p) {
    return {n, p == Polarization::V ? low_mask(n) : 0};
  }

  std::size_t size() const { return n_; }
  std::uint64_t bits() const { return bits_; }

  Polarization operator[](std::size_t i) const {
    return bit_of(bits_, i) ? Polarization::V : Polarization::H;
  }

  std::size_t count_v() const { return static_cast<std::size_t>(std::popcount(bits_)); }

  PatternLabel complement() const { return {n_, ~bits_ & low_mask(n_)}; }

  std::string str() const {
    std::string out(n_, 'H');
    for (std::size_t i = 0; i < n_; ++i) {
      if (bit_of(bits_, i)) out[i] = 'V';
    }
    return out;
  }

  // Dictionary order of str() with H < V.
  bool lexicographically_less(const PatternLabel& other) const {
    const std::uint64_t diff = bits_ ^ other.bits_;
    if (diff == 0) return n_ < other.n_;
    const int first = std::countr_zero(diff);
    return !bit_of(bits_, static_cast<std::size_t>(first));
  }

  friend bool operator==(const PatternLabel&, const PatternLabel&) = default;

 private:
  std::size_t n_;
  std::uint64_t bits_;
};

inline std::string pattern_string(std::uint64_t bits, std::size_t n) { return PatternLabel(n, bits).str(); }

}  // namespace cghz
