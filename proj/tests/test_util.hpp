#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cghz/hybrid_state.hpp"
#include "cghz/rng.hpp"

namespace cghz::testing {

using Dense = std::vector<std::complex<double>>;

inline Dense to_dense(const QubitState& s) {
  Dense v(std::size_t{1} << s.n_qubits());
  for (const auto& t : s.terms()) v[t.pattern] = t.amp;
  return v;
}

// a (x) b with a on the low qubits.
inline Dense kron(const Dense& low, const Dense& high) {
  Dense out(low.size() * high.size());
  for (std::size_t h = 0; h < high.size(); ++h) {
    for (std::size_t l = 0; l < low.size(); ++l) out[h * low.size() + l] = low[l] * high[h];
  }
  return out;
}

inline Dense dense_ghz(std::size_t n, int sign) {
  Dense v(std::size_t{1} << n);
  v.front() = 1.0 / std::sqrt(2.0);
  v.back() += sign / std::sqrt(2.0);
  return v;
}

inline double dense_fidelity(const Dense& a, const Dense& b) {
  std::complex<double> s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return std::norm(s);
}

inline std::complex<double> random_amp(SplitMix64& rng) {
  return {standard_normal(rng), standard_normal(rng)};
}

inline QubitState random_qubit_state(std::size_t n, std::size_t terms, SplitMix64& rng) {
  std::vector<QubitTerm> ts;
  for (std::size_t i = 0; i < terms; ++i) ts.push_back({rng() & low_mask(n), random_amp(rng)});
  return QubitState::from_terms(n, std::move(ts));
}

inline HybridState random_hybrid_state(std::size_t n, std::size_t terms, SplitMix64& rng, double max_abs = 3.0) {
  std::vector<HybridTerm> ts;
  for (std::size_t i = 0; i < terms; ++i) {
    const double r = max_abs * uniform01(rng);
    const double ph = 6.283185307179586 * uniform01(rng);
    ts.push_back({rng() & low_mask(n), ProbeBranch(r, ph), random_amp(rng)});
  }
  return HybridState::from_terms(n, true, std::move(ts));
}

}  // namespace cghz::testing
