#include "cghz/optical_elements.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace cghz;
using cghz::testing::random_hybrid_state;
using cghz::testing::random_qubit_state;

namespace {

QubitState basis(const char* p) {
  const auto label = PatternLabel::parse(p);
  return QubitState::from_terms(label.size(), {{label.bits(), 1.0}});
}

void expect_same(const QubitState& a, const QubitState& b, double tol = 1e-12) {
  ASSERT_EQ(a.n_qubits(), b.n_qubits());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.terms()[i].pattern, b.terms()[i].pattern);
    EXPECT_NEAR(std::abs(a.terms()[i].amp - b.terms()[i].amp), 0.0, tol);
  }
}

}  // namespace

TEST(Hadamard, single_photon) {
  const auto s = hadamard(basis("H"), 0);
  EXPECT_NEAR(fidelity(s, make_plus_product(1, +1)), 1.0, 1e-15);
  const auto v = hadamard(basis("V"), 0);
  EXPECT_NEAR(fidelity(v, make_plus_product(1, -1)), 1.0, 1e-15);
  EXPECT_NEAR(v.amplitude(1).real(), -1 / std::numbers::sqrt2, 1e-15);
}

TEST(Hadamard, involution) {
  SplitMix64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const auto s = random_qubit_state(5, 10, rng);
    const std::size_t q = rng() % 5;
    expect_same(hadamard(hadamard(s, q), q), s);
  }
}

TEST(Hadamard, ghz4_expansion) {
  auto s = make_ghz(4, +1);
  for (std::size_t q = 0; q < 4; ++q) s = hadamard(s, q);
  // [(H+V)^4 + (H-V)^4] / (4 sqrt 2): only even-V patterns survive with 2/(4 sqrt 2).
  ASSERT_EQ(s.size(), 8u);
  for (const auto& t : s.terms()) {
    EXPECT_EQ(std::popcount(t.pattern) % 2, 0);
    EXPECT_NEAR(t.amp.real(), 1.0 / (2.0 * std::numbers::sqrt2), 1e-15);
  }
}

TEST(PauliX, example) {
  expect_same(pauli_x(basis("HV"), 0), basis("VV"));
  EXPECT_THROW(pauli_x(basis("HV"), 2), std::invalid_argument);
}

TEST(PauliZ, ghz_sign_flip) {
  expect_same(pauli_z(make_ghz(2, +1), 0), make_ghz(2, -1));
  EXPECT_THROW(pauli_z(make_ghz(2, +1), 5), std::invalid_argument);
}

TEST(PhaseGate, pi_equals_pauli_z) {
  SplitMix64 rng(4);
  for (int i = 0; i < 30; ++i) {
    const auto s = random_qubit_state(4, 9, rng);
    const std::size_t q = rng() % 4;
    expect_same(phase_gate(s, q, std::numbers::pi), pauli_z(s, q));
  }
  EXPECT_THROW(phase_gate(basis("H"), 1, 0.3), std::invalid_argument);
}

TEST(Kerr, conditional_phase) {
  const double alpha = 2.0, theta = 0.1;
  const auto s = kerr(attach_probe(make_plus_product(1, +1), alpha), 0, theta, Polarization::V);
  const auto expected = HybridState::from_terms(1, true,
                                                {{0, ProbeBranch(alpha, 0.0), 1.0},
                                                 {1, ProbeBranch(alpha, theta), 1.0}});
  EXPECT_NEAR(std::abs(inner_product(s, expected)), 1.0, 1e-14);
  const auto id = kerr(attach_probe(make_plus_product(1, +1), alpha), 0, 0.0, Polarization::H);
  EXPECT_NEAR(std::abs(inner_product(id, attach_probe(make_plus_product(1, +1), alpha))), 1.0, 1e-15);
}

TEST(Kerr, phase_additivity) {
  const double theta = 0.03;
  auto s = attach_probe(basis("VV"), 3.0);
  s = kerr(s, 0, theta, Polarization::V);
  s = kerr(s, 1, theta, Polarization::V);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.terms()[0].branch.phase(), 2 * theta, 1e-15);
  EXPECT_NEAR(s.terms()[0].branch.magnitude(), 3.0, 1e-15);
}

TEST(Kerr, requires_probe) {
  EXPECT_THROW(kerr(to_hybrid(basis("H")), 0, 0.1, Polarization::H), StateError);
  EXPECT_THROW(probe_shift(to_hybrid(basis("H")), 0.1), StateError);
}

TEST(Kerr, distinct_qubits_commute) {
  SplitMix64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_hybrid_state(4, 10, rng);
    const auto a = kerr(kerr(s, 1, 0.2, Polarization::V), 3, -0.7, Polarization::H);
    const auto b = kerr(kerr(s, 3, -0.7, Polarization::H), 1, 0.2, Polarization::V);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      EXPECT_EQ(a.terms()[j].pattern, b.terms()[j].pattern);
      EXPECT_EQ(a.terms()[j].amp, b.terms()[j].amp);
      EXPECT_EQ(a.terms()[j].branch.magnitude(), b.terms()[j].branch.magnitude());
      EXPECT_NEAR(a.terms()[j].branch.phase(), b.terms()[j].branch.phase(), 1e-15);
    }
  }
}

TEST(ProbeShift, examples) {
  const double theta = 0.25;
  const auto s = probe_shift(attach_probe(make_ghz(2, +1), 1.5), -theta);
  for (const auto& t : s.terms()) EXPECT_NEAR(t.branch.phase(), -theta, 1e-15);
  const auto twice = probe_shift(probe_shift(attach_probe(make_ghz(2, +1), 1.5), 0.1), 0.2);
  const auto once = probe_shift(attach_probe(make_ghz(2, +1), 1.5), 0.3);
  EXPECT_NEAR(std::abs(inner_product(twice, once)), 1.0, 1e-14);
  const auto zero = probe_shift(attach_probe(make_ghz(2, +1), 1.5), 0.0);
  EXPECT_NEAR(std::abs(inner_product(zero, attach_probe(make_ghz(2, +1), 1.5))), 1.0, 1e-15);
}

TEST(Toffoli, examples) {
  expect_same(toffoli_m(basis("VVH"), {0, 1}, 2), basis("VVV"));
  expect_same(toffoli_m(basis("HVH"), {0, 1}, 2), basis("HVH"));
  const auto ghz = append_qubit(make_ghz(2, +1), Polarization::H);
  expect_same(toffoli_m(ghz, {0, 1}, 2), make_ghz(3, +1));
  EXPECT_THROW(toffoli_m(basis("VVH"), {0, 0}, 2), std::invalid_argument);
  EXPECT_THROW(toffoli_m(basis("VVH"), {0, 2}, 2), std::invalid_argument);
  EXPECT_THROW(toffoli_m(basis("VVH"), {0, 1}, 3), std::invalid_argument);
}

TEST(Toffoli, self_inverse) {
  SplitMix64 rng(6);
  for (int i = 0; i < 30; ++i) {
    const auto s = random_qubit_state(6, 20, rng);
    expect_same(toffoli_m(toffoli_m(s, {0, 2, 4}, 5), {0, 2, 4}, 5), s);
  }
}

// Every element must preserve inner products.
TEST(Unitarity, preserves_inner_products) {
  SplitMix64 rng(8);
  for (int i = 0; i < 40; ++i) {
    const auto a = random_qubit_state(5, 12, rng);
    const auto b = random_qubit_state(5, 12, rng);
    const auto before = inner_product(a, b);
    const auto check = [&](auto op) {
      const auto after = inner_product(op(a), op(b));
      EXPECT_NEAR(std::abs(after - before), 0.0, 1e-10);
      EXPECT_NEAR(op(a).norm(), 1.0, 1e-10);
    };
    check([](const QubitState& s) { return hadamard(s, 2); });
    check([](const QubitState& s) { return pauli_x(s, 1); });
    check([](const QubitState& s) { return pauli_z(s, 4); });
    check([](const QubitState& s) { return phase_gate(s, 3, 0.77); });
    check([](const QubitState& s) { return toffoli_m(s, {0, 1, 2}, 4); });

    const auto ha = random_hybrid_state(3, 8, rng);
    const auto hb = random_hybrid_state(3, 8, rng);
    const auto hbefore = inner_product(ha, hb);
    EXPECT_NEAR(std::abs(inner_product(kerr(ha, 1, 0.4, Polarization::V), kerr(hb, 1, 0.4, Polarization::V)) - hbefore),
                0.0, 1e-10);
    EXPECT_NEAR(std::abs(inner_product(probe_shift(ha, -1.1), probe_shift(hb, -1.1)) - hbefore), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(inner_product(hadamard(ha, 0), hadamard(hb, 0)) - hbefore), 0.0, 1e-10);
  }
}

TEST(Correction, apply_and_name) {
  expect_same(apply(basis("HV"), Correction::bit_flip(0)), basis("VV"));
  expect_same(apply(make_ghz(2, +1), Correction::phase_z(1)), make_ghz(2, -1));
  expect_same(apply(make_ghz(2, +1), Correction::phase(1, std::numbers::pi)), make_ghz(2, -1));
  EXPECT_EQ(Correction::bit_flip(0).name(), "X");
  EXPECT_EQ(Correction::phase_z(0).name(), "Z");
  EXPECT_EQ(Correction::phase(0, 0.1).name(), "P");
}

TEST(AppendQubit, adds_top_bit) {
  const auto s = append_qubit(basis("HV"), Polarization::V);
  expect_same(s, basis("HVV"));
  EXPECT_EQ(erase_bit(0b101u, 1), 0b11u);
  EXPECT_EQ(erase_bit(0b110u, 0), 0b11u);
}
