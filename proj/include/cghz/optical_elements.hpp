#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cghz/errors.hpp"
#include "cghz/hybrid_state.hpp"
#include "cghz/pattern.hpp"

namespace cghz {

template <class S>
concept SparseState = requires(const S& s, std::vector<typename S::term_type> ts) {
  { s.n_qubits() } -> std::convertible_to<std::size_t>;
  { s.terms() };
  { s.with_terms(std::move(ts)) } -> std::same_as<S>;
};

namespace detail {

inline void check_qubit(std::size_t n, std::size_t q) {
  if (q >= n) {
    throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range for " + std::to_string(n) +
                                " qubits");
  }
}

// Applies `f(term, out)` to every term and rebuilds a canonical state.
template <SparseState S, class F>
S map_terms(const S& s, F&& f) {
  std::vector<typename S::term_type> out;
  out.reserve(s.terms().size());
  for (const auto& t : s.terms()) f(t, out);
  return s.with_terms(std::move(out));
}

}  // namespace detail

// Half-wave plate at 22.5 degrees.
template <SparseState S>
S hadamard(const S& s, std::size_t qubit) {
  detail::check_qubit(s.n_qubits(), qubit);
  const double r = 1.0 / std::numbers::sqrt2;
  const std::uint64_t mask = std::uint64_t{1} << qubit;
  return detail::map_terms(s, [&](const auto& t, auto& out) {
    auto lo = t;
    auto hi = t;
    lo.pattern = t.pattern & ~mask;
    hi.pattern = t.pattern | mask;
    lo.amp = t.amp * r;
    hi.amp = (t.pattern & mask) ? -t.amp * r : t.amp * r;
    out.push_back(lo);
    out.push_back(hi);
  });
}

template <SparseState S>
S pauli_x(const S& s, std::size_t qubit) {
  detail::check_qubit(s.n_qubits(), qubit);
  const std::uint64_t mask = std::uint64_t{1} << qubit;
  return detail::map_terms(s, [&](const auto& t, auto& out) {
    auto u = t;
    u.pattern ^= mask;
    out.push_back(u);
  });
}

// |V> picks up exp(i phi).
template <SparseState S>
S phase_gate(const S& s, std::size_t qubit, double phi) {
  detail::check_qubit(s.n_qubits(), qubit);
  const std::uint64_t mask = std::uint64_t{1} << qubit;
  const complex factor = std::polar(1.0, phi);
  return detail::map_terms(s, [&](const auto& t, auto& out) {
    auto u = t;
    if (t.pattern & mask) u.amp *= factor;
    out.push_back(u);
  });
}

template <SparseState S>
S pauli_z(const S& s, std::size_t qubit) {
  detail::check_qubit(s.n_qubits(), qubit);
  const std::uint64_t mask = std::uint64_t{1} << qubit;
  return detail::map_terms(s, [&](const auto& t, auto& out) {
    auto u = t;
    if (t.pattern & mask) u.amp = -u.amp;
    out.push_back(u);
  });
}

// Flips `target` on every term whose controls are all V.
template <SparseState S>
S toffoli_m(const S& s, std::span<const std::size_t> controls, std::size_t target) {
  detail::check_qubit(s.n_qubits(), target);
  std::uint64_t control_mask = 0;
  for (auto c : controls) {
    detail::check_qubit(s.n_qubits(), c);
    const std::uint64_t bit = std::uint64_t{1} << c;
    if (c == target || (control_mask & bit)) throw std::invalid_argument("toffoli_m: indices must be distinct");
    control_mask |= bit;
  }
  const std::uint64_t target_bit = std::uint64_t{1} << target;
  return detail::map_terms(s, [&](const auto& t, auto& out) {
    auto u = t;
    if ((t.pattern & control_mask) == control_mask) u.pattern ^= target_bit;
    out.push_back(u);
  });
}

template <SparseState S>
S toffoli_m(const S& s, std::initializer_list<std::size_t> controls, std::size_t target) {
  return toffoli_m(s, std::span<const std::size_t>(controls.begin(), controls.size()), target);
}

// Cross-Kerr cell: the probe branch of every term whose `qubit` equals
// `trigger` is rotated by theta_eff.
inline HybridState kerr(const HybridState& s, std::size_t qubit, double theta_eff, Polarization trigger) {
  if (!s.has_probe()) throw StateError("kerr: no probe attached");
  detail::check_qubit(s.n_qubits(), qubit);
  const bool want_v = trigger == Polarization::V;
  return detail::map_terms(s, [&](const HybridTerm& t, std::vector<HybridTerm>& out) {
    auto u = t;
    if (bit_of(t.pattern, qubit) == want_v) u.branch = t.branch.rotated(theta_eff);
    out.push_back(u);
  });
}

// Linear phase shifter on the probe.
inline HybridState probe_shift(const HybridState& s, double phi) {
  if (!s.has_probe()) throw StateError("probe_shift: no probe attached");
  return detail::map_terms(s, [&](const HybridTerm& t, std::vector<HybridTerm>& out) {
    auto u = t;
    u.branch = t.branch.rotated(phi);
    out.push_back(u);
  });
}

// Classically controlled single-photon correction.
struct Correction {
  struct BitFlip {};
  struct PhaseZ {};
  struct Phase {
    double radians = 0.0;
  };
  std::variant<BitFlip, PhaseZ, Phase> kind;
  std::size_t qubit = 0;

  static Correction bit_flip(std::size_t q) { return {BitFlip{}, q}; }
  static Correction phase_z(std::size_t q) { return {PhaseZ{}, q}; }
  static Correction phase(std::size_t q, double radians) { return {Phase{radians}, q}; }

  std::string name() const {
    if (std::holds_alternative<BitFlip>(kind)) return "X";
    if (std::holds_alternative<PhaseZ>(kind)) return "Z";
    return "P";
  }
};

template <SparseState S>
S apply(const S& s, const Correction& c) {
  if (std::holds_alternative<Correction::BitFlip>(c.kind)) return pauli_x(s, c.qubit);
  if (std::holds_alternative<Correction::PhaseZ>(c.kind)) return pauli_z(s, c.qubit);
  return phase_gate(s, c.qubit, std::get<Correction::Phase>(c.kind).radians);
}

// Appends a qubit in the given polarization as the new highest index.
inline QubitState append_qubit(const QubitState& s, Polarization p) {
  if (s.n_qubits() >= kMaxQubits) throw std::invalid_argument("append_qubit: register full");
  const std::uint64_t bit = p == Polarization::V ? std::uint64_t{1} << s.n_qubits() : 0;
  std::vector<QubitTerm> out;
  out.reserve(s.size());
  for (const auto& t : s.terms()) out.push_back({t.pattern | bit, t.amp});
  return QubitState::from_terms(s.n_qubits() + 1, std::move(out));
}

// Removes bit `q` from a pattern, shifting higher bits down.
inline std::uint64_t erase_bit(std::uint64_t pattern, std::size_t q) {
  const std::uint64_t below = pattern & low_mask(q);
  const std::uint64_t above = q + 1 >= 64 ? 0 : (pattern >> (q + 1)) << q;
  return below | above;
}

}  // namespace cghz
