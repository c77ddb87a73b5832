#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cghz/errors.hpp"
#include "cghz/homodyne.hpp"
#include "cghz/hybrid_state.hpp"
#include "cghz/optical_elements.hpp"
#include "cghz/pattern.hpp"

namespace cghz {

inline constexpr unsigned kMaxBlockSize = 30;

// Per-photon Kerr couplings in the symmetric convention: photon i rotates the
// probe by +h_i when H and by -h_i when V, and the probe is then shifted by
// global_shift. The committed family is a binary ladder,
//
//   h_i = 2^i theta / 2          for i < m-1,
//   h_{m-1} = -(2^(m-1) - 1) theta / 2,
//
// so sum h_i = 0 and global_shift = 0. A pattern's net phase is theta times
// the binary number formed by its H positions among the first m-1 photons when
// the last photon is V, and minus the number formed by its V positions when
// the last photon is H. HV..V sits at +theta and H..HV at the extreme
// +(2^(m-1) - 1) theta.
struct KerrWeights {
  unsigned m = 0;
  double theta = 0.0;
  std::vector<std::int64_t> doubled_units;  // 2 h_i / theta, exact
  std::vector<double> signed_strengths;     // h_i in radians
  double global_shift = 0.0;
};

inline KerrWeights kerr_weights(unsigned m, double theta) {
  if (m == 0 || m > kMaxBlockSize) throw std::invalid_argument("kerr_weights: block size must be in [1, 30]");
  KerrWeights w;
  w.m = m;
  w.theta = theta;
  for (unsigned i = 0; i + 1 < m; ++i) w.doubled_units.push_back(std::int64_t{1} << i);
  w.doubled_units.push_back(-((std::int64_t{1} << (m - 1)) - 1));
  for (auto d : w.doubled_units) w.signed_strengths.push_back(0.5 * static_cast<double>(d) * theta);
  return w;
}

// Net probe phase of a block pattern in units of theta.
inline std::int64_t phase_index(const PatternLabel& p, const KerrWeights& w) {
  if (p.size() != w.m) throw std::invalid_argument("phase_index: pattern length does not match block size");
  std::int64_t twice = 0;
  for (unsigned i = 0; i < w.m; ++i) twice += p[i] == Polarization::H ? w.doubled_units[i] : -w.doubled_units[i];
  return twice / 2;
}

inline double pattern_phase(const PatternLabel& p, const KerrWeights& w) {
  return w.theta * static_cast<double>(phase_index(p, w)) + w.global_shift;
}

// Pair class of a block pattern.
inline unsigned window_of(const PatternLabel& p, const KerrWeights& w) {
  const auto idx = phase_index(p, w);
  return static_cast<unsigned>(idx < 0 ? -idx : idx);
}

// The two complementary members of pair class k, lexicographically smaller
// first.
inline std::pair<PatternLabel, PatternLabel> class_members(unsigned k, const KerrWeights& w) {
  if (k > max_window(w.m)) throw std::invalid_argument("class_members: window out of range");
  // member at +k theta: last photon V, H wherever k has a 1 bit
  std::uint64_t bits = std::uint64_t{1} << (w.m - 1);
  for (unsigned i = 0; i + 1 < w.m; ++i) {
    if (!bit_of(k, i)) bits |= std::uint64_t{1} << i;
  }
  PatternLabel plus(w.m, bits);
  PatternLabel minus = plus.complement();
  if (minus.lexicographically_less(plus)) return {minus, plus};
  return {plus, minus};
}

inline PatternLabel class_representative(unsigned k, const KerrWeights& w) { return class_members(k, w).first; }

// Pattern whose V positions the feed-forward flips. It is the member with an
// even number of V photons, so the flips act as +1 on (|H>-|V>)^m inputs and
// the correction is the same linear map on both C-GHZ branches; when both
// members have the same parity (even m) it is the representative.
inline PatternLabel flip_anchor(unsigned k, const KerrWeights& w) {
  const auto [rep, other] = class_members(k, w);
  if (rep.count_v() % 2 == 1 && other.count_v() % 2 == 0) return other;
  return rep;
}

// Physical layout of the weights: one-sided Kerr cells with non-negative
// strengths followed by a single probe phase shifter of -(2^(m-1) - 1) theta.
struct KerrCell {
  unsigned photon = 0;
  Polarization trigger = Polarization::H;
  double strength = 0.0;
};

struct KerrNetwork {
  std::vector<KerrCell> cells;
  double probe_shift = 0.0;
};

// kerr(+h) on H and kerr(-h) on V equal kerr(2h) on H plus a shift of -h, or
// kerr(-2h) on V plus a shift of +h; each photon takes the form whose Kerr
// strength is non-negative.
inline KerrNetwork kerr_network(const KerrWeights& w) {
  KerrNetwork net;
  net.probe_shift = w.global_shift;
  for (unsigned i = 0; i < w.m; ++i) {
    const double h = w.signed_strengths[i];
    if (h >= 0.0) {
      net.cells.push_back({i, Polarization::H, 2.0 * h});
      net.probe_shift -= h;
    } else {
      net.cells.push_back({i, Polarization::V, -2.0 * h});
      net.probe_shift += h;
    }
  }
  return net;
}

// Probe phase accumulated by a block pattern, in the exact floating-point
// order the network applies to a state.
inline double network_phase(const PatternLabel& p, const KerrNetwork& net) {
  double phase = 0.0;
  for (const auto& c : net.cells) {
    if (p[c.photon] == c.trigger) phase = phase + c.strength;
  }
  return phase + net.probe_shift;
}

inline HybridState apply_network(const HybridState& s, std::span<const std::size_t> block, const KerrNetwork& net) {
  HybridState out = s;
  for (const auto& c : net.cells) out = kerr(out, block[c.photon], c.strength, c.trigger);
  return probe_shift(out, net.probe_shift);
}

inline std::uint64_t extract_block(std::uint64_t pattern, std::span<const std::size_t> block) {
  std::uint64_t b = 0;
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (bit_of(pattern, block[i])) b |= std::uint64_t{1} << i;
  }
  return b;
}

inline std::vector<std::size_t> block_indices(std::size_t j, std::size_t m) {
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), j * m);
  return idx;
}

struct FeedForwardResult {
  QubitState state;
  std::vector<Correction> corrections;
};

// Classically controlled corrections for window k and outcome x: bit flips on
// the V positions of flip_anchor(k), then one phase shifter on the block's
// first photon removing the x-dependent relative phase between the two
// members of the class.
inline FeedForwardResult feed_forward(unsigned k, double x, double alpha, const KerrWeights& w,
                                      const QubitState& state, std::span<const std::size_t> block) {
  if (block.size() != w.m) throw std::invalid_argument("feed_forward: block size mismatch");
  const auto net = kerr_network(w);
  const PatternLabel anchor = flip_anchor(k, w);
  std::vector<Correction> corrections;
  for (unsigned i = 0; i < w.m; ++i) {
    if (anchor[i] == Polarization::V) corrections.push_back(Correction::bit_flip(block[i]));
  }
  const long double a = homodyne_phase(alpha, network_phase(anchor, net), x);
  const long double c = homodyne_phase(alpha, network_phase(anchor.complement(), net), x);
  const double angle = static_cast<double>(std::remainder(a - c, 2.0L * std::numbers::pi_v<long double>));
  if (std::abs(angle) > 1e-14) corrections.push_back(Correction::phase(block[0], angle));
  QubitState out = state;
  for (const auto& corr : corrections) out = apply(out, corr);
  return {std::move(out), std::move(corrections)};
}

inline FeedForwardResult feed_forward(unsigned k, double x, double alpha, const KerrWeights& w,
                                      const QubitState& state) {
  return feed_forward(k, x, alpha, w, state, block_indices(0, w.m));
}

// Measurement override. With `window` set the outcome is conditioned on
// correct discrimination: the state is projected onto pair class `window`
// before collapse and x defaults to that class's peak. With only `x` set the
// collapse is physical at the given outcome.
struct Readout {
  std::optional<double> x;
  std::optional<unsigned> window;
};

struct EntanglerOutcome {
  QubitState state;
  MeasurementRecord record;
};

inline void check_entangler_parameters(std::size_t m, double alpha, double theta) {
  if (m == 0 || m > kMaxBlockSize) throw std::invalid_argument("entangler: block size must be in [1, 30]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("entangler: alpha must be positive");
  if (!(theta > 0.0) || !(theta < std::numbers::pi / std::ldexp(1.0, static_cast<int>(m)))) {
    throw std::invalid_argument("entangler: theta must lie in (0, pi / 2^m)");
  }
}

// GHZ entangler acting on the photons listed in `block` of a larger register.
template <class Engine>
EntanglerOutcome entangle_block(const QubitState& input, std::span<const std::size_t> block, double alpha,
                                double theta, Engine& rng, const Readout& readout = {}) {
  const auto m = static_cast<unsigned>(block.size());
  check_entangler_parameters(m, alpha, theta);
  for (auto q : block) detail::check_qubit(input.n_qubits(), q);
  const KerrWeights w = kerr_weights(m, theta);
  const HybridState probed = apply_network(attach_probe(input, alpha), block, kerr_network(w));

  MeasurementRecord record;
  HybridState measured = probed;
  if (readout.window) {
    const unsigned k = *readout.window;
    if (k > max_window(m)) throw std::invalid_argument("entangler: forced window out of range");
    std::vector<HybridTerm> kept;
    for (const auto& t : probed.terms()) {
      if (window_of(PatternLabel(m, extract_block(t.pattern, block)), w) == k) kept.push_back(t);
    }
    if (kept.empty()) throw ImpossibleOutcomeError("entangler: forced window has zero probability");
    measured = probed.with_terms(std::move(kept));
    record.x = readout.x.value_or(peak_mean(alpha, theta, k));
    record.window_k = k;
  } else {
    record.x = readout.x ? *readout.x : sample_x(probed, rng);
    record.window_k = classify(record.x, alpha, theta, m);
  }
  record.probability_density = outcome_pdf(probed, record.x);

  QubitState collapsed = collapse(measured, record.x);
  auto ff = feed_forward(record.window_k, record.x, alpha, w, collapsed, block);
  record.corrections = std::move(ff.corrections);
  return {std::move(ff.state), std::move(record)};
}

// Full m-photon entangler on an m-qubit input.
template <class Engine>
EntanglerOutcome run_entangler(const QubitState& input, double alpha, double theta, Engine& rng,
                               const Readout& readout = {}) {
  const auto block = block_indices(0, input.n_qubits());
  return entangle_block(input, block, alpha, theta, rng, readout);
}

}  // namespace cghz
