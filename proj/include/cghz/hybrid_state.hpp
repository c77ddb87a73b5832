#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cghz/errors.hpp"
#include "cghz/pattern.hpp"

namespace cghz {

using complex = std::complex<double>;

// Two probe branches closer than this (absolute distance of complex
// amplitudes) are the same coherent state.
inline constexpr double kBranchMergeTolerance = 1e-9;
// Terms whose normalized amplitude falls below this are dropped.
inline constexpr double kAmplitudePruneTolerance = 1e-12;

// One coherent amplitude of the probe beam, kept in polar form. The phase is
// accumulated verbatim (never wrapped) so that a Kerr network replayed on a
// scalar reproduces a branch label bit for bit.
class ProbeBranch {
 public:
  ProbeBranch() = default;  // vacuum

  ProbeBranch(double magnitude, double phase) : magnitude_(magnitude), phase_(phase) {
    if (!(magnitude >= 0.0) || !std::isfinite(magnitude) || !std::isfinite(phase)) {
      throw std::invalid_argument("ProbeBranch: magnitude must be finite and non-negative");
    }
  }

  static ProbeBranch from_amplitude(complex beta) { return {std::abs(beta), std::arg(beta)}; }

  double magnitude() const { return magnitude_; }
  double phase() const { return phase_; }
  complex amplitude() const { return std::polar(magnitude_, phase_); }
  double real() const { return magnitude_ * std::cos(phase_); }
  double imag() const { return magnitude_ * std::sin(phase_); }

  ProbeBranch rotated(double phi) const { return {magnitude_, phase_ + phi}; }

 private:
  double magnitude_ = 0.0;
  double phase_ = 0.0;
};

// |beta - gamma| without cancellation for large, nearly equal amplitudes.
inline double branch_distance(const ProbeBranch& a, const ProbeBranch& b) {
  const double dr = a.magnitude() - b.magnitude();
  const double s = std::sin(0.5 * (a.phase() - b.phase()));
  return std::sqrt(dr * dr + 4.0 * a.magnitude() * b.magnitude() * s * s);
}

inline bool same_branch(const ProbeBranch& a, const ProbeBranch& b) {
  return branch_distance(a, b) <= kBranchMergeTolerance;
}

// <beta|gamma> = exp(-|beta|^2/2 - |gamma|^2/2 + conj(beta) gamma), evaluated
// as exp(-|beta-gamma|^2/2) times a phase.
inline complex coherent_overlap(const ProbeBranch& beta, const ProbeBranch& gamma) {
  const double d = branch_distance(beta, gamma);
  const long double im = static_cast<long double>(beta.magnitude()) * gamma.magnitude() *
                         std::sin(static_cast<long double>(gamma.phase()) - beta.phase());
  const long double mag = std::exp(-0.5L * d * d);
  const auto z = std::polar(mag, im);
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

struct QubitTerm {
  std::uint64_t pattern = 0;
  complex amp;
};

struct HybridTerm {
  std::uint64_t pattern = 0;
  ProbeBranch branch;
  complex amp;
};

namespace detail {

inline void check_qubit_count(std::size_t n) {
  if (n == 0 || n > kMaxQubits) throw std::invalid_argument("qubit count must be in [1, 64]");
}

inline void check_patterns_fit(std::size_t n, auto const& terms) {
  const std::uint64_t mask = low_mask(n);
  for (const auto& t : terms) {
    if ((t.pattern & ~mask) != 0) throw std::invalid_argument("term pattern exceeds qubit count");
  }
}

// Scales to unit norm, prunes tiny terms and rescales. `norm_of` computes the
// squared norm of a term list.
template <class Term, class NormFn>
void normalize_and_prune(std::vector<Term>& terms, NormFn norm_of) {
  double n2 = norm_of(terms);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw DegenerateStateError("state has zero norm");
  double scale = 1.0 / std::sqrt(n2);
  for (auto& t : terms) t.amp *= scale;
  std::erase_if(terms, [](const Term& t) { return std::abs(t.amp) < kAmplitudePruneTolerance; });
  if (terms.empty()) throw DegenerateStateError("all amplitudes pruned");
  n2 = norm_of(terms);
  scale = 1.0 / std::sqrt(n2);
  for (auto& t : terms) t.amp *= scale;
}

}  // namespace detail

// Probe-free sparse polarization state; terms sorted by pattern, unique.
class QubitState {
 public:
  using term_type = QubitTerm;

  // Merges duplicate patterns, prunes and renormalizes.
  static QubitState from_terms(std::size_t n, std::vector<QubitTerm> terms) {
    detail::check_qubit_count(n);
    detail::check_patterns_fit(n, terms);
    std::stable_sort(terms.begin(), terms.end(),
                     [](const QubitTerm& a, const QubitTerm& b) { return a.pattern < b.pattern; });
    std::vector<QubitTerm> merged;
    merged.reserve(terms.size());
    for (const auto& t : terms) {
      if (!merged.empty() && merged.back().pattern == t.pattern) {
        merged.back().amp += t.amp;
      } else {
        merged.push_back(t);
      }
    }
    detail::normalize_and_prune(merged, [](const std::vector<QubitTerm>& ts) {
      double s = 0.0;
      for (const auto& t : ts) s += std::norm(t.amp);
      return s;
    });
    return QubitState(n, std::move(merged));
  }

  std::size_t n_qubits() const { return n_; }
  std::span<const QubitTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  complex amplitude(std::uint64_t pattern) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), pattern,
                               [](const QubitTerm& t, std::uint64_t p) { return t.pattern < p; });
    return it != terms_.end() && it->pattern == pattern ? it->amp : complex{};
  }
  complex amplitude(const PatternLabel& p) const {
    if (p.size() != n_) throw ShapeError("pattern length does not match state");
    return amplitude(p.bits());
  }

  double norm() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::norm(t.amp);
    return std::sqrt(s);
  }

  QubitState with_terms(std::vector<QubitTerm> terms) const { return from_terms(n_, std::move(terms)); }

 private:
  QubitState(std::size_t n, std::vector<QubitTerm> terms) : n_(n), terms_(std::move(terms)) {}

  std::size_t n_;
  std::vector<QubitTerm> terms_;
};

// Sparse superposition of (pattern, probe branch) terms. Without a probe every
// term carries the vacuum branch and the state behaves as a QubitState.
class HybridState {
 public:
  using term_type = HybridTerm;

  static HybridState from_terms(std::size_t n, bool has_probe, std::vector<HybridTerm> terms) {
    detail::check_qubit_count(n);
    detail::check_patterns_fit(n, terms);
    if (!has_probe) {
      for (auto& t : terms) {
        if (t.branch.magnitude() != 0.0) throw StateError("probe branch on a probe-free state");
        t.branch = ProbeBranch{};
      }
    }
    std::stable_sort(terms.begin(), terms.end(), [](const HybridTerm& a, const HybridTerm& b) {
      if (a.pattern != b.pattern) return a.pattern < b.pattern;
      if (a.branch.phase() != b.branch.phase()) return a.branch.phase() < b.branch.phase();
      return a.branch.magnitude() < b.branch.magnitude();
    });
    std::vector<HybridTerm> merged;
    merged.reserve(terms.size());
    std::size_t group_start = 0;
    for (const auto& t : terms) {
      if (!merged.empty() && merged.back().pattern != t.pattern) group_start = merged.size();
      bool absorbed = false;
      for (std::size_t i = group_start; i < merged.size(); ++i) {
        if (same_branch(merged[i].branch, t.branch)) {
          merged[i].amp += t.amp;
          absorbed = true;
          break;
        }
      }
      if (!absorbed) merged.push_back(t);
    }
    detail::normalize_and_prune(merged, [](const std::vector<HybridTerm>& ts) { return squared_norm(ts); });
    return HybridState(n, has_probe, std::move(merged));
  }

  std::size_t n_qubits() const { return n_; }
  bool has_probe() const { return has_probe_; }
  std::span<const HybridTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  double norm() const { return std::sqrt(squared_norm(terms_)); }

  HybridState with_terms(std::vector<HybridTerm> terms) const {
    return from_terms(n_, has_probe_, std::move(terms));
  }

  QubitState to_qubit_state() const {
    if (has_probe_) throw StateError("state still carries a probe");
    std::vector<QubitTerm> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back({t.pattern, t.amp});
    return QubitState::from_terms(n_, std::move(out));
  }

  // Terms sharing a pattern interfere through the coherent-state overlap.
  static double squared_norm(std::span<const HybridTerm> ts) {
    double s = 0.0;
    std::size_t i = 0;
    while (i < ts.size()) {
      std::size_t j = i;
      while (j < ts.size() && ts[j].pattern == ts[i].pattern) ++j;
      for (std::size_t a = i; a < j; ++a) {
        s += std::norm(ts[a].amp);
        for (std::size_t b = a + 1; b < j; ++b) {
          s += 2.0 * std::real(std::conj(ts[a].amp) * ts[b].amp * coherent_overlap(ts[a].branch, ts[b].branch));
        }
      }
      i = j;
    }
    return s;
  }

 private:
  HybridState(std::size_t n, bool has_probe, std::vector<HybridTerm> terms)
      : n_(n), has_probe_(has_probe), terms_(std::move(terms)) {}

  std::size_t n_;
  bool has_probe_;
  std::vector<HybridTerm> terms_;
};

inline QubitState canonicalize(const QubitState& s) {
  return QubitState::from_terms(s.n_qubits(), {s.terms().begin(), s.terms().end()});
}

inline HybridState canonicalize(const HybridState& s) {
  return HybridState::from_terms(s.n_qubits(), s.has_probe(), {s.terms().begin(), s.terms().end()});
}

inline HybridState to_hybrid(const QubitState& s) {
  std::vector<HybridTerm> out;
  out.reserve(s.size());
  for (const auto& t : s.terms()) out.push_back({t.pattern, ProbeBranch{}, t.amp});
  return HybridState::from_terms(s.n_qubits(), false, std::move(out));
}

// Tensors a coherent probe |alpha> (alpha real, positive) onto the state.
inline HybridState attach_probe(const QubitState& s, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("probe amplitude must be positive");
  std::vector<HybridTerm> out;
  out.reserve(s.size());
  for (const auto& t : s.terms()) out.push_back({t.pattern, ProbeBranch(alpha, 0.0), t.amp});
  return HybridState::from_terms(s.n_qubits(), true, std::move(out));
}

inline complex inner_product(const QubitState& a, const QubitState& b) {
  if (a.n_qubits() != b.n_qubits()) throw ShapeError("inner_product: qubit counts differ");
  complex acc{};
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  while (ia != a.terms().end() && ib != b.terms().end()) {
    if (ia->pattern < ib->pattern) {
      ++ia;
    } else if (ib->pattern < ia->pattern) {
      ++ib;
    } else {
      acc += std::conj(ia->amp) * ib->amp;
      ++ia;
      ++ib;
    }
  }
  return acc;
}

inline complex inner_product(const HybridState& a, const HybridState& b) {
  if (a.n_qubits() != b.n_qubits()) throw ShapeError("inner_product: qubit counts differ");
  if (a.has_probe() != b.has_probe()) throw ShapeError("inner_product: probe flags differ");
  complex acc{};
  const auto ta = a.terms();
  const auto tb = b.terms();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ta.size() && j < tb.size()) {
    if (ta[i].pattern < tb[j].pattern) {
      ++i;
    } else if (tb[j].pattern < ta[i].pattern) {
      ++j;
    } else {
      const std::uint64_t p = ta[i].pattern;
      std::size_t i_end = i;
      while (i_end < ta.size() && ta[i_end].pattern == p) ++i_end;
      std::size_t j_end = j;
      while (j_end < tb.size() && tb[j_end].pattern == p) ++j_end;
      for (std::size_t x = i; x < i_end; ++x) {
        for (std::size_t y = j; y < j_end; ++y) {
          acc += std::conj(ta[x].amp) * tb[y].amp * coherent_overlap(ta[x].branch, tb[y].branch);
        }
      }
      i = i_end;
      j = j_end;
    }
  }
  return acc;
}

inline double fidelity(const QubitState& a, const QubitState& b) {
  return std::clamp(std::norm(inner_product(a, b)), 0.0, 1.0);
}

namespace detail {
inline void check_sign(int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
}
inline constexpr std::size_t kMaxDenseQubits = 26;
}  // namespace detail

// ((|H> + sign |V>)/sqrt(2))^n.
inline QubitState make_plus_product(std::size_t n, int sign) {
  detail::check_sign(sign);
  if (n == 0) throw std::invalid_argument("make_plus_product: n must be at least 1");
  if (n > detail::kMaxDenseQubits) throw std::invalid_argument("make_plus_product: n too large for 2^n terms");
  const std::uint64_t count = std::uint64_t{1} << n;
  const double a = std::pow(2.0, -0.5 * static_cast<double>(n));
  std::vector<QubitTerm> terms;
  terms.reserve(count);
  for (std::uint64_t p = 0; p < count; ++p) {
    const bool negative = sign < 0 && (std::popcount(p) & 1);
    terms.push_back({p, complex(negative ? -a : a, 0.0)});
  }
  return QubitState::from_terms(n, std::move(terms));
}

inline QubitState make_ghz(std::size_t n, int sign) {
  detail::check_sign(sign);
  if (n == 0) throw std::invalid_argument("make_ghz: n must be at least 1");
  detail::check_qubit_count(n);
  const double a = 1.0 / std::sqrt(2.0);
  return QubitState::from_terms(n, {{0, complex(a, 0)}, {low_mask(n), complex(sign * a, 0)}});
}

// Pattern with the listed m-qubit blocks (bits of `blocks`) set to all-V.
inline std::uint64_t block_pattern(std::uint64_t blocks, std::size_t k, std::size_t m) {
  std::uint64_t p = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (bit_of(blocks, j)) p |= low_mask(m) << (j * m);
  }
  return p;
}

// (GHZ_m^+^k + sign GHZ_m^-^k)/sqrt(2): every block all-H or all-V, with an
// even (sign = +1) or odd (sign = -1) number of all-V blocks.
inline QubitState make_cghz(std::size_t k, std::size_t m, int sign) {
  detail::check_sign(sign);
  if (k == 0 || m == 0) throw std::invalid_argument("make_cghz: k and m must be at least 1");
  if (k * m > kMaxQubits) throw std::invalid_argument("make_cghz: k*m exceeds 64 qubits");
  if (k > detail::kMaxDenseQubits) throw std::invalid_argument("make_cghz: k too large");
  const int parity = sign > 0 ? 0 : 1;
  const double a = std::pow(2.0, -0.5 * static_cast<double>(k - 1));
  std::vector<QubitTerm> terms;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << k); ++b) {
    if ((std::popcount(b) & 1) == parity) terms.push_back({block_pattern(b, k, m), complex(a, 0)});
  }
  return QubitState::from_terms(k * m, std::move(terms));
}

}  // namespace cghz
