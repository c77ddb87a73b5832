#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cghz/errors.hpp"
#include "cghz/hybrid_state.hpp"
#include "cghz/optical_elements.hpp"
#include "cghz/rng.hpp"

namespace cghz {

// X-quadrature homodyne detection with X = a + a^dagger. A coherent branch
// beta has the position-space wavefunction
//
//   psi_beta(x) = (2 pi)^(-1/4) exp(-(x - 2 Re beta)^2 / 4 + i Im beta (x - Re beta)),
//
// so its outcome density is Gaussian with mean 2 Re beta and unit variance.

struct GaussianComponent {
  double weight = 0.0;
  double mean = 0.0;
  double variance = 1.0;
};

struct MeasurementRecord {
  double x = 0.0;
  unsigned window_k = 0;
  std::vector<Correction> corrections;
  double probability_density = 0.0;
};

namespace detail {

struct LogWavefunction {
  long double log_magnitude;
  long double phase;
};

// Evaluated in extended precision: for probe amplitudes near 1e6 the phase is
// of order 1e10 rad and feed-forward must cancel it to well below 1e-4 rad.
inline LogWavefunction coherent_log_wavefunction(const ProbeBranch& b, double x) {
  const long double r = b.magnitude();
  const long double ph = b.phase();
  const long double re = r * std::cos(ph);
  const long double im = r * std::sin(ph);
  const long double d = static_cast<long double>(x) - 2.0L * re;
  const long double log_norm = -0.25L * std::log(2.0L * std::numbers::pi_v<long double>);
  return {log_norm - 0.25L * d * d, im * (static_cast<long double>(x) - re)};
}

inline complex to_complex(std::complex<long double> z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// Per-pattern collapsed amplitudes scaled by exp(-shift); returns the shift.
inline long double collapsed_terms(const HybridState& s, double x, std::vector<QubitTerm>& out) {
  std::vector<LogWavefunction> lw;
  lw.reserve(s.size());
  long double shift = -std::numeric_limits<long double>::infinity();
  for (const auto& t : s.terms()) {
    auto w = coherent_log_wavefunction(t.branch, x);
    w.log_magnitude += std::log(static_cast<long double>(std::abs(t.amp)));
    shift = std::max(shift, w.log_magnitude);
    lw.push_back(w);
  }
  out.clear();
  const auto ts = s.terms();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const complex unit = ts[i].amp / std::abs(ts[i].amp);
    const complex z = unit * to_complex(std::polar(std::exp(lw[i].log_magnitude - shift), lw[i].phase));
    if (!out.empty() && out.back().pattern == ts[i].pattern) {
      out.back().amp += z;
    } else {
      out.push_back({ts[i].pattern, z});
    }
  }
  return shift;
}

inline void require_probe(const HybridState& s, const char* what) {
  if (!s.has_probe()) throw StateError(std::string(what) + ": no probe attached");
}

}  // namespace detail

inline complex coherent_wavefunction(const ProbeBranch& b, double x) {
  const auto w = detail::coherent_log_wavefunction(b, x);
  return detail::to_complex(std::polar(std::exp(w.log_magnitude), w.phase));
}

// Phase acquired by branch alpha*exp(i phi) when the homodyne reads x. Uses
// the same arithmetic as collapse(), so feed-forward cancels it exactly.
inline long double homodyne_phase(double alpha, double phi, double x) {
  return detail::coherent_log_wavefunction(ProbeBranch(alpha, phi), x).phase;
}

// Gaussian mixture of the outcome density; one component per distinct mean,
// sorted by decreasing mean. Exact when each pattern carries one branch.
inline std::vector<GaussianComponent> outcome_density(const HybridState& s) {
  detail::require_probe(s, "outcome_density");
  std::vector<GaussianComponent> raw;
  raw.reserve(s.size());
  double total = 0.0;
  for (const auto& t : s.terms()) {
    const double w = std::norm(t.amp);
    raw.push_back({w, 2.0 * t.branch.real(), 1.0});
    total += w;
  }
  std::stable_sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.mean > b.mean; });
  std::vector<GaussianComponent> out;
  for (const auto& c : raw) {
    const double tol = std::max(kBranchMergeTolerance, 1e-12 * std::abs(c.mean));
    if (!out.empty() && std::abs(out.back().mean - c.mean) <= tol) {
      out.back().weight += c.weight;
    } else {
      out.push_back(c);
    }
  }
  for (auto& c : out) c.weight /= total;
  return out;
}

// Exact outcome probability density at x.
inline double outcome_pdf(const HybridState& s, double x) {
  detail::require_probe(s, "outcome_pdf");
  std::vector<QubitTerm> terms;
  const long double shift = detail::collapsed_terms(s, x, terms);
  long double sum = 0.0L;
  for (const auto& t : terms) sum += std::norm(t.amp);
  return static_cast<double>(std::exp(2.0L * shift) * sum);
}

// Index of the drawn component and the outcome.
template <class Engine>
std::pair<std::size_t, double> sample_component(const std::vector<GaussianComponent>& mixture, Engine& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t idx = mixture.size() - 1;
  for (std::size_t i = 0; i < mixture.size(); ++i) {
    acc += mixture[i].weight;
    if (u < acc) {
      idx = i;
      break;
    }
  }
  const double x = mixture[idx].mean + std::sqrt(mixture[idx].variance) * standard_normal(rng);
  return {idx, x};
}

template <class Engine>
double sample_x(const HybridState& s, Engine& rng) {
  return sample_component(outcome_density(s), rng).second;
}

// Projects the probe onto |x> and traces it out.
inline QubitState collapse(const HybridState& s, double x) {
  detail::require_probe(s, "collapse");
  std::vector<QubitTerm> terms;
  const long double shift = detail::collapsed_terms(s, x, terms);
  long double sum = 0.0L;
  for (const auto& t : terms) sum += std::norm(t.amp);
  const long double log_norm = shift + 0.5L * std::log(sum);
  if (!(sum > 0.0L) || log_norm < std::log(1e-30L)) {
    throw ImpossibleOutcomeError("homodyne outcome x = " + std::to_string(x) + " has vanishing probability");
  }
  return QubitState::from_terms(s.n_qubits(), std::move(terms));
}

// Peak position 2 alpha cos(k theta) of pair class k.
inline double peak_mean(double alpha, double theta, unsigned k) { return 2.0 * alpha * std::cos(k * theta); }

// Distance between peaks k and k+1, written to avoid cancellation.
inline double peak_gap(double alpha, double theta, unsigned k) {
  return 4.0 * alpha * std::sin(0.5 * (2.0 * k + 1.0) * theta) * std::sin(0.5 * theta);
}

inline unsigned max_window(unsigned m) {
  if (m == 0 || m > 32) throw std::invalid_argument("block size must be in [1, 32]");
  return (1u << (m - 1)) - 1u;
}

// Boundary between windows k and k+1.
inline double window_boundary(double alpha, double theta, unsigned k) {
  return alpha * (std::cos(k * theta) + std::cos((k + 1.0) * theta));
}

namespace detail {
inline void check_window_geometry(double alpha, double theta, unsigned m) {
  if (!(alpha > 0.0)) throw std::invalid_argument("probe amplitude must be positive");
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be non-negative");
  if (max_window(m) * theta > std::numbers::pi) {
    throw std::invalid_argument("theta too large: peaks are no longer ordered");
  }
}
}  // namespace detail

// Window whose peak is nearest to x; boundaries are midpoints and a tie
// resolves to the smaller k.
inline unsigned classify(double x, double alpha, double theta, unsigned m) {
  detail::check_window_geometry(alpha, theta, m);
  unsigned lo = 0;
  unsigned hi = max_window(m);
  // smallest k in [lo, hi) with x >= boundary(k), else hi
  while (lo < hi) {
    const unsigned mid = lo + (hi - lo) / 2;
    if (x >= window_boundary(alpha, theta, mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

// P(standard normal > gap/2).
inline double boundary_error(double gap) { return 0.5 * std::erfc(gap / (2.0 * std::numbers::sqrt2)); }

// Probability that the outcome lands outside the window of its own pair
// class, averaged over classes with equal weight (uniform product input).
inline double misclassification_prob(double alpha, double theta, unsigned m) {
  detail::check_window_geometry(alpha, theta, m);
  const unsigned kmax = max_window(m);
  if (kmax == 0) return 0.0;
  double total = 0.0;
  for (unsigned k = 0; k < kmax; ++k) total += 2.0 * boundary_error(peak_gap(alpha, theta, k));
  return total / (kmax + 1.0);
}

namespace detail {

template <class F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(F&& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

// Integral of the standard normal density over [b, infinity), b >= 0,
// factored as phi(b) * int_0^inf exp(-b t - t^2/2) dt.
inline double normal_upper_tail(double b) {
  const double phi_b = std::exp(-0.5 * b * b) / std::sqrt(2.0 * std::numbers::pi);
  const double t_max = std::min(40.0, 60.0 / std::max(b, 1e-3));
  const double g = integrate([b](double t) { return std::exp(-b * t - 0.5 * t * t); }, 0.0, t_max, 1e-13);
  return phi_b * g;
}

}  // namespace detail

// Same quantity as misclassification_prob, obtained by numerically
// integrating each Gaussian over the complement of its classify() window.
inline double misclassification_prob_integrated(double alpha, double theta, unsigned m) {
  detail::check_window_geometry(alpha, theta, m);
  const unsigned kmax = max_window(m);
  if (kmax == 0) return 0.0;
  double total = 0.0;
  for (unsigned k = 0; k <= kmax; ++k) {
    const double mu = peak_mean(alpha, theta, k);
    if (k > 0) total += detail::normal_upper_tail(std::max(0.0, window_boundary(alpha, theta, k - 1) - mu));
    if (k < kmax) total += detail::normal_upper_tail(std::max(0.0, mu - window_boundary(alpha, theta, k)));
  }
  return total / (kmax + 1.0);
}

}  // namespace cghz
