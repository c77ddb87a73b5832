#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cghz/entangler.hpp"
#include "cghz/errors.hpp"
#include "cghz/homodyne.hpp"
#include "cghz/hybrid_state.hpp"
#include "cghz/optical_elements.hpp"
#include "cghz/rng.hpp"

namespace cghz {

struct SchemeResult {
  QubitState output;
  std::vector<MeasurementRecord> records;       // one per block entangler
  std::optional<MeasurementRecord> input_record;  // scheme 1 with an entangled input
  std::optional<Polarization> detector;         // scheme 2 only
  int target_sign = 1;
  std::size_t k = 0;
  std::size_t m = 0;

  QubitState target() const { return make_cghz(k, m, target_sign); }
};

struct Scheme1Options {
  // Per-block window override (see Readout); empty means sample.
  std::optional<std::vector<unsigned>> forced_windows;
  // Prepare the km-photon GHZ input with a km-wide entangler instead of
  // constructing it directly. Its theta is chosen so the extreme branch
  // phase matches that of the block entanglers.
  bool entangled_input = false;
  std::optional<unsigned> input_window;
};

struct Scheme2Options {
  std::optional<std::vector<unsigned>> forced_windows;
  std::optional<Polarization> forced_detector;
};

namespace detail {

inline void check_scheme_sizes(std::size_t k, std::size_t m) {
  if (k == 0 || m == 0) throw std::invalid_argument("scheme: k and m must be at least 1");
  if (k * m + 1 > kMaxQubits) throw std::invalid_argument("scheme: k*m too large");
}

inline Readout block_readout(const std::optional<std::vector<unsigned>>& forced, std::size_t j, std::size_t k) {
  if (!forced) return {};
  if (forced->size() != k) throw std::invalid_argument("forced windows: need one entry per block");
  return {std::nullopt, (*forced)[j]};
}

template <class Engine>
QubitState entangle_blocks(QubitState state, std::size_t k, std::size_t m, double alpha, double theta,
                           Engine& rng, const std::optional<std::vector<unsigned>>& forced,
                           std::vector<MeasurementRecord>& records) {
  for (std::size_t j = 0; j < k; ++j) {
    const auto block = block_indices(j, m);
    auto r = entangle_block(state, block, alpha, theta, rng, block_readout(forced, j, k));
    state = std::move(r.state);
    records.push_back(std::move(r.record));
  }
  return state;
}

}  // namespace detail

// Projective H/V measurement of qubit `target`; the measured qubit is removed.
template <class Engine>
std::pair<Polarization, QubitState> ancilla_measure(const QubitState& s, std::size_t target, Engine& rng,
                                                    std::optional<Polarization> forced = std::nullopt) {
  detail::check_qubit(s.n_qubits(), target);
  if (s.n_qubits() < 2) throw std::invalid_argument("ancilla_measure: cannot remove the only qubit");
  double p_h = 0.0;
  for (const auto& t : s.terms()) {
    if (!bit_of(t.pattern, target)) p_h += std::norm(t.amp);
  }
  Polarization outcome;
  if (forced) {
    outcome = *forced;
  } else {
    outcome = uniform01(rng) < p_h ? Polarization::H : Polarization::V;
  }
  const double p = outcome == Polarization::H ? p_h : 1.0 - p_h;
  if (p < 1e-30) throw ImpossibleOutcomeError("ancilla_measure: outcome has zero probability");
  const bool want_v = outcome == Polarization::V;
  std::vector<QubitTerm> kept;
  for (const auto& t : s.terms()) {
    if (bit_of(t.pattern, target) == want_v) kept.push_back({erase_bit(t.pattern, target), t.amp});
  }
  return {outcome, QubitState::from_terms(s.n_qubits() - 1, std::move(kept))};
}

// km-photon GHZ -> Hadamard on every photon -> k block entanglers. Needs odd
// m: only then does each entangler send (|H>-|V>)^m to GHZ_m^-.
template <class Engine>
SchemeResult scheme1(std::size_t k, std::size_t m, double alpha, double theta, Engine& rng,
                     const Scheme1Options& opts = {}) {
  detail::check_scheme_sizes(k, m);
  if (m % 2 == 0) {
    throw PreconditionViolation("scheme 1 requires odd block size m (got m = " + std::to_string(m) +
                                "); for even m the entangler maps both branches to GHZ+");
  }
  std::optional<MeasurementRecord> input_record;
  QubitState state = make_ghz(k * m, +1);
  if (opts.entangled_input) {
    const std::size_t n = k * m;
    const double budget = theta * std::max(1.0, static_cast<double>(max_window(static_cast<unsigned>(m))));
    const unsigned wide = max_window(static_cast<unsigned>(n));
    const double wide_theta = wide == 0 ? theta : budget / wide;
    Readout readout;
    if (opts.input_window) readout.window = *opts.input_window;
    auto r = run_entangler(make_plus_product(n, +1), alpha, wide_theta, rng, readout);
    state = std::move(r.state);
    input_record = std::move(r.record);
  }
  for (std::size_t q = 0; q < k * m; ++q) state = hadamard(state, q);
  std::vector<MeasurementRecord> records;
  QubitState output =
      detail::entangle_blocks(std::move(state), k, m, alpha, theta, rng, opts.forced_windows, records);
  return {std::move(output), std::move(records), std::move(input_record), std::nullopt, 1, k, m};
}

// km single photons -> k block entanglers -> k m-control Toffolis onto a
// shared ancilla -> H/V detection of the ancilla. Detector H leaves the
// even-parity C-GHZ state, V the odd one.
template <class Engine>
SchemeResult scheme2(std::size_t k, std::size_t m, double alpha, double theta, Engine& rng,
                     const Scheme2Options& opts = {}) {
  detail::check_scheme_sizes(k, m);
  std::vector<MeasurementRecord> records;
  QubitState state = detail::entangle_blocks(make_plus_product(k * m, +1), k, m, alpha, theta, rng,
                                             opts.forced_windows, records);
  state = append_qubit(state, Polarization::H);
  const std::size_t ancilla = k * m;
  for (std::size_t j = 0; j < k; ++j) {
    const auto controls = block_indices(j, m);
    state = toffoli_m(state, std::span<const std::size_t>(controls), ancilla);
  }

  auto [outcome, post] = ancilla_measure(state, ancilla, rng, opts.forced_detector);
  const int sign = outcome == Polarization::H ? 1 : -1;
  return {std::move(post), std::move(records), std::nullopt, outcome, sign, k, m};
}

}  // namespace cghz
