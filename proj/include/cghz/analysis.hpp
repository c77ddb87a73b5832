#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cghz/entangler.hpp"
#include "cghz/errors.hpp"
#include "cghz/homodyne.hpp"
#include "cghz/hybrid_state.hpp"
#include "cghz/rng.hpp"

namespace cghz {

// Per-step Kerr phase for block size m when the extreme branch may rotate by
// at most `theta_budget`.
inline double step_theta(unsigned m, double theta_budget) {
  const unsigned kmax = max_window(m);
  return kmax == 0 ? theta_budget : theta_budget / kmax;
}

// Smallest probe amplitude (relative tolerance 1e-6) whose closed-form
// misclassification probability is at most target_err.
inline double required_alpha(unsigned m, double theta_budget, double target_err) {
  if (m < 2) throw std::invalid_argument("required_alpha: needs m >= 2 (m = 1 has a single window)");
  if (!(target_err > 0.0 && target_err < 0.5)) throw std::invalid_argument("required_alpha: target_err in (0, 1/2)");
  if (!(theta_budget > 0.0)) throw std::invalid_argument("required_alpha: theta_budget must be positive");
  const double theta = step_theta(m, theta_budget);
  double lo = 0.0;
  double hi = 1.0;
  while (misclassification_prob(hi, theta, m) > target_err) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::runtime_error("required_alpha: bracket diverged");
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (misclassification_prob(mid, theta, m) <= target_err) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// classify() with the window boundaries tabulated once.
class WindowClassifier {
 public:
  WindowClassifier(double alpha, double theta, unsigned m) {
    detail::check_window_geometry(alpha, theta, m);
    const unsigned kmax = max_window(m);
    boundaries_.reserve(kmax);
    for (unsigned k = 0; k < kmax; ++k) boundaries_.push_back(window_boundary(alpha, theta, k));
  }

  unsigned operator()(double x) const {
    std::size_t lo = 0;
    std::size_t hi = boundaries_.size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (x >= boundaries_[mid]) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return static_cast<unsigned>(lo);
  }

 private:
  std::vector<double> boundaries_;
};

struct MonteCarloEstimate {
  double rate = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

// Samples homodyne outcomes of the Kerr-evolved uniform product state and
// counts how often classify() misses the window of the branch that produced
// the outcome.
template <class Engine>
MonteCarloEstimate monte_carlo_misclassification(double alpha, double theta, unsigned m, std::size_t samples,
                                                 Engine& rng) {
  if (samples == 0) throw std::invalid_argument("monte_carlo_misclassification: need at least one sample");
  const KerrWeights w = kerr_weights(m, theta);
  const auto block = block_indices(0, m);
  const HybridState probed = apply_network(attach_probe(make_plus_product(m, +1), alpha), block, kerr_network(w));
  const auto mixture = outcome_density(probed);
  const WindowClassifier classifier(alpha, theta, m);
  std::vector<unsigned> truth;
  truth.reserve(mixture.size());
  for (const auto& c : mixture) truth.push_back(classifier(c.mean));
  std::size_t errors = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto [idx, x] = sample_component(mixture, rng);
    if (classifier(x) != truth[idx]) ++errors;
  }
  const double n = static_cast<double>(samples);
  const double r = static_cast<double>(errors) / n;
  return {r, std::sqrt(r * (1.0 - r) / n), samples};
}

// One row of the feasibility table.
struct FeasibilityRow {
  unsigned m = 0;
  double theta = 0.0;
  double alpha = 0.0;
  double err_closed = 0.0;
  double err_mc = 0.0;
  double err_mc_stderr = 0.0;
  double alpha_required = 0.0;
};

// `alpha` defaults to the required amplitude, so the Monte Carlo column then
// checks the target directly.
inline FeasibilityRow feasibility_row(unsigned m, double theta_budget, std::optional<double> alpha,
                                      double target_err, std::size_t mc_samples, std::uint64_t seed) {
  FeasibilityRow row;
  row.m = m;
  row.theta = step_theta(m, theta_budget);
  row.alpha_required = required_alpha(m, theta_budget, target_err);
  row.alpha = alpha.value_or(row.alpha_required);
  row.err_closed = misclassification_prob(row.alpha, row.theta, m);
  SplitMix64 rng(seed);
  const auto mc = monte_carlo_misclassification(row.alpha, row.theta, m, mc_samples, rng);
  row.err_mc = mc.rate;
  row.err_mc_stderr = mc.stderr_;
  return row;
}

// ---------------------------------------------------------------------------
// Dephasing robustness. Model: i.i.d. phase flips with probability p on every
// photon. Results depend on this choice of noise model.

enum class Encoding { cghz, ghz };

inline std::string_view to_string(Encoding e) { return e == Encoding::cghz ? "cghz" : "ghz"; }

struct NoiseModel {
  double p = 0.0;

  explicit NoiseModel(double p_flip) : p(p_flip) {
    if (!(p_flip >= 0.0 && p_flip <= 0.5)) throw std::invalid_argument("phase-flip probability must be in [0, 1/2]");
  }
  // Damping of a density-matrix entry between patterns differing on `d` photons.
  double damping(unsigned d) const { return std::pow(1.0 - 2.0 * p, static_cast<double>(d)); }
};

struct CoherenceReport {
  Encoding encoding = Encoding::cghz;
  std::size_t km = 0;
  double p = 0.0;
  double logical_offdiag = 0.0;
};

inline constexpr std::size_t kMaxExactDephasingQubits = 14;

// GHZ_m^sign tensored k times.
inline QubitState make_ghz_power(std::size_t k, std::size_t m, int sign) {
  if (k == 0 || m == 0 || k * m > kMaxQubits || k > 26) throw std::invalid_argument("make_ghz_power: bad sizes");
  const double a = std::pow(2.0, -0.5 * static_cast<double>(k));
  std::vector<QubitTerm> terms;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << k); ++b) {
    const bool negative = sign < 0 && (std::popcount(b) & 1);
    terms.push_back({block_pattern(b, k, m), complex(negative ? -a : a, 0.0)});
  }
  return QubitState::from_terms(k * m, std::move(terms));
}

// The pure state of an encoding and its two macroscopic branch vectors.
struct EncodedBranches {
  QubitState state;
  QubitState branch0;
  QubitState branch1;
};

inline EncodedBranches encoded_branches(Encoding e, std::size_t k, std::size_t m) {
  if (e == Encoding::cghz) return {make_cghz(k, m, +1), make_ghz_power(k, m, +1), make_ghz_power(k, m, -1)};
  const std::size_t n = k * m;
  return {make_ghz(n, +1), QubitState::from_terms(n, {{0, complex(1, 0)}}),
          QubitState::from_terms(n, {{low_mask(n), complex(1, 0)}})};
}

// |<branch0| rho |branch1>| after the phase-flip channel. Phase flips keep the
// pattern support, so rho lives on the pure state's support and the entry
// between patterns s and t is damped by (1-2p)^popcount(s xor t).
inline CoherenceReport dephase_offdiag(Encoding e, std::size_t k, std::size_t m, double p) {
  if (k == 0 || m == 0) throw std::invalid_argument("dephase_offdiag: k and m must be at least 1");
  if (k * m > kMaxExactDephasingQubits) throw SizeError("dephase_offdiag: k*m exceeds the exact path limit of 14");
  const NoiseModel noise(p);
  const auto [psi, b0, b1] = encoded_branches(e, k, m);
  std::vector<double> damp(k * m + 1);
  for (unsigned d = 0; d <= k * m; ++d) damp[d] = noise.damping(d);

  complex acc{};
  for (const auto& s : psi.terms()) {
    const complex left = std::conj(b0.amplitude(s.pattern)) * s.amp;
    if (left == complex{}) continue;
    for (const auto& t : psi.terms()) {
      const complex right = std::conj(t.amp) * b1.amplitude(t.pattern);
      acc += left * right * damp[static_cast<unsigned>(std::popcount(s.pattern ^ t.pattern))];
    }
  }
  return {e, k * m, p, std::abs(acc)};
}

struct EncodingComparison {
  double p = 0.0;
  CoherenceReport cghz;
  CoherenceReport ghz;
  bool cghz_at_least_ghz = false;
};

inline std::vector<EncodingComparison> compare_encodings(std::size_t k, std::size_t m,
                                                         const std::vector<double>& p_grid) {
  if (p_grid.empty()) throw std::invalid_argument("compare_encodings: empty p grid");
  std::vector<EncodingComparison> rows;
  rows.reserve(p_grid.size());
  for (double p : p_grid) {
    auto c = dephase_offdiag(Encoding::cghz, k, m, p);
    auto g = dephase_offdiag(Encoding::ghz, k, m, p);
    rows.push_back({p, c, g, c.logical_offdiag >= g.logical_offdiag});
  }
  return rows;
}

}  // namespace cghz
