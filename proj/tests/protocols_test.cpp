#include "cghz/protocols.hpp"

#include <bit>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace cghz;

namespace {

double budget_theta(std::size_t m) { return 1e-2 / std::max(1u, max_window(static_cast<unsigned>(m))); }

std::vector<unsigned> windows(std::size_t k, unsigned w) { return std::vector<unsigned>(k, w); }

// Returns the number of all-V blocks, or -1 if some block is mixed.
int all_v_blocks(std::uint64_t pattern, std::size_t k, std::size_t m) {
  int count = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto block = (pattern >> (j * m)) & low_mask(m);
    if (block == low_mask(m)) {
      ++count;
    } else if (block != 0) {
      return -1;
    }
  }
  return count;
}

}  // namespace

TEST(Scheme1, forced_windows_reach_cghz) {
  SplitMix64 rng(1);
  for (auto [k, m] : {std::pair<std::size_t, std::size_t>{2, 3}, {3, 3}, {2, 5}, {1, 3}, {2, 1}}) {
    const unsigned kmax = max_window(static_cast<unsigned>(m));
    for (unsigned w : {0u, kmax}) {
      Scheme1Options opts;
      opts.forced_windows = windows(k, w);
      const auto r = scheme1(k, m, 1e6, budget_theta(m), rng, opts);
      EXPECT_GE(fidelity(r.output, make_cghz(k, m, +1)), 1 - 1e-9) << k << "," << m << " w=" << w;
      EXPECT_EQ(r.target_sign, 1);
      EXPECT_EQ(r.records.size(), k);
      EXPECT_EQ(r.output.size(), std::size_t{1} << (k - 1));
    }
  }
}

TEST(Scheme1, mixed_windows) {
  SplitMix64 rng(2);
  Scheme1Options opts;
  opts.forced_windows = std::vector<unsigned>{1, 3, 2};
  const auto r = scheme1(3, 3, 1e6, budget_theta(3), rng, opts);
  EXPECT_GE(fidelity(r.output, r.target()), 1 - 1e-9);
}

TEST(Scheme1, entangled_input) {
  SplitMix64 rng(3);
  Scheme1Options opts;
  opts.forced_windows = windows(2, 1);
  opts.entangled_input = true;
  opts.input_window = 5;
  const auto r = scheme1(2, 3, 1e6, budget_theta(3), rng, opts);
  ASSERT_TRUE(r.input_record.has_value());
  EXPECT_EQ(r.input_record->window_k, 5u);
  EXPECT_GE(fidelity(r.output, make_cghz(2, 3, +1)), 1 - 1e-9);
}

TEST(Scheme1, even_block_rejected) {
  SplitMix64 rng(4);
  EXPECT_THROW(scheme1(2, 2, 1e6, 0.01, rng), PreconditionViolation);
  try {
    scheme1(1, 4, 1e6, 0.001, rng);
    FAIL();
  } catch (const PreconditionViolation& e) {
    EXPECT_NE(std::string(e.what()).find("odd"), std::string::npos);
  }
}

TEST(Scheme2, two_by_two_expansions) {
  SplitMix64 rng(5);
  Scheme2Options opts;
  opts.forced_windows = windows(2, 1);
  opts.forced_detector = Polarization::H;
  const auto h = scheme2(2, 2, 1e6, 0.01, rng, opts);
  ASSERT_EQ(h.output.size(), 2u);
  EXPECT_NEAR(std::abs(h.output.amplitude(PatternLabel::parse("HHHH"))), 1 / std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(std::abs(h.output.amplitude(PatternLabel::parse("VVVV"))), 1 / std::sqrt(2.0), 1e-10);
  EXPECT_GE(fidelity(h.output, make_cghz(2, 2, +1)), 1 - 1e-10);

  opts.forced_detector = Polarization::V;
  const auto v = scheme2(2, 2, 1e6, 0.01, rng, opts);
  EXPECT_EQ(v.target_sign, -1);
  EXPECT_NEAR(std::abs(v.output.amplitude(PatternLabel::parse("HHVV"))), 1 / std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(std::abs(v.output.amplitude(PatternLabel::parse("VVHH"))), 1 / std::sqrt(2.0), 1e-10);
  EXPECT_GE(fidelity(v.output, make_cghz(2, 2, -1)), 1 - 1e-10);
}

TEST(Scheme2, structure_and_parity) {
  SplitMix64 rng(6);
  for (std::size_t k = 1; k <= 4; ++k) {
    for (std::size_t m = 1; m <= 3; ++m) {
      for (auto det : {Polarization::H, Polarization::V}) {
        Scheme2Options opts;
        opts.forced_windows = windows(k, max_window(static_cast<unsigned>(m)));
        opts.forced_detector = det;
        const auto r = scheme2(k, m, 1e6, budget_theta(m), rng, opts);
        EXPECT_EQ(r.output.n_qubits(), k * m);
        EXPECT_EQ(r.output.size(), std::size_t{1} << (k - 1));
        for (const auto& t : r.output.terms()) {
          const int v = all_v_blocks(t.pattern, k, m);
          ASSERT_GE(v, 0);
          EXPECT_EQ(v % 2, det == Polarization::H ? 0 : 1);
        }
        EXPECT_GE(fidelity(r.output, r.target()), 1 - 1e-9);
      }
    }
  }
}

TEST(Schemes, agree_for_odd_blocks) {
  SplitMix64 rng(7);
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::size_t m : {1u, 3u}) {
      Scheme1Options o1;
      o1.forced_windows = windows(k, 0);
      Scheme2Options o2;
      o2.forced_windows = windows(k, max_window(static_cast<unsigned>(m)));
      o2.forced_detector = Polarization::H;
      const auto a = scheme1(k, m, 1e6, budget_theta(m), rng, o1);
      const auto b = scheme2(k, m, 1e6, budget_theta(m), rng, o2);
      EXPECT_NEAR(fidelity(a.output, b.output), 1.0, 1e-10) << k << "," << m;
    }
  }
}

TEST(Scheme2, sampled_detector_is_fair) {
  SplitMix64 rng(8);
  int h = 0;
  const int shots = 4000;
  for (int i = 0; i < shots; ++i) {
    const auto r = scheme2(2, 2, 1e6, 0.01, rng);
    h += *r.detector == Polarization::H;
    ASSERT_GE(fidelity(r.output, r.target()), 1 - 1e-9);
  }
  EXPECT_NEAR(static_cast<double>(h) / shots, 0.5, 3 * 0.5 / std::sqrt(shots));
}

TEST(AncillaMeasure, examples) {
  SplitMix64 rng(9);
  const auto prod = append_qubit(make_ghz(2, +1), Polarization::H);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(ancilla_measure(prod, 2, rng).first, Polarization::H);
  EXPECT_THROW(ancilla_measure(prod, 2, rng, Polarization::V), ImpossibleOutcomeError);

  const auto plus = hadamard(append_qubit(make_ghz(1, +1), Polarization::H), 1);
  int h = 0;
  for (int i = 0; i < 10000; ++i) h += ancilla_measure(plus, 1, rng).first == Polarization::H;
  EXPECT_NEAR(h / 10000.0, 0.5, 0.015);

  const auto ghz = make_ghz(2, +1);
  const auto [o1, s1] = ancilla_measure(ghz, 1, rng, Polarization::H);
  EXPECT_EQ(s1.amplitude(0), complex(1.0, 0.0));
  const auto [o2, s2] = ancilla_measure(ghz, 1, rng, Polarization::V);
  EXPECT_EQ(s2.amplitude(1), complex(1.0, 0.0));
  EXPECT_THROW(ancilla_measure(make_ghz(1, 1), 0, rng), std::invalid_argument);
  EXPECT_THROW(ancilla_measure(ghz, 2, rng), std::invalid_argument);
}
