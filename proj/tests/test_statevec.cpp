// Copyright 2026 The mp2q Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mp2q/error.hpp"
#include "mp2q/rng.hpp"
#include "mp2q/statevec.hpp"
#include "mp2q/unitary.hpp"
#include "oracle.hpp"

using namespace mp2q;

namespace {

Gate random_gate(std::mt19937_64& rng, int n, bool allow_controls) {
  std::uniform_int_distribution<int> kind(0, 6);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  std::vector<int> qs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) qs[static_cast<std::size_t>(i)] = i;
  std::shuffle(qs.begin(), qs.end(), rng);
  Gate g;
  switch (kind(rng)) {
    case 0: g = Gate::x(qs[0]); break;
    case 1: g = Gate::h(qs[0]); break;
    case 2: g = Gate::rx(qs[0], ang(rng)); break;
    case 3: g = Gate::ry(qs[0], ang(rng)); break;
    case 4: g = Gate::rz(qs[0], ang(rng)); break;
    case 5: g = Gate::swap(qs[0], qs[1]); break;
    default: g = Gate::pauli_x_exp({qs[0], qs[1]}, ang(rng)); break;
  }
  if (allow_controls && rng() % 2) {
    const std::size_t used = g.targets.size();
    const std::size_t extra = 1 + rng() % 2;
    for (std::size_t i = used; i < used + extra && i < qs.size(); ++i) g.controls.push_back(qs[i]);
    g.polarity = rng() % 2 ? Polarity::One : Polarity::Zero;
  }
  return g;
}

}  // namespace

TEST(StateVector, XFlipsZero) {
  Circuit c(1);
  c.add(Gate::x(0));
  const auto s = apply_circuit(StateVector(1), c);
  EXPECT_NEAR(std::abs(s[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1] - Complex(1, 0)), 0.0, 1e-15);
}

TEST(StateVector, HadamardIsInvolution) {
  Circuit c(1);
  c.add(Gate::h(0)).add(Gate::h(0));
  const auto s = apply_circuit(StateVector(1), c);
  EXPECT_NEAR(std::abs(s[0] - Complex(1, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s[1]), 0.0, 1e-12);
}

TEST(StateVector, RyClosedForm) {
  const double t = std::numbers::pi / 3;
  Circuit c(1);
  c.add(Gate::ry(0, t));
  const auto s = apply_circuit(StateVector(1), c);
  EXPECT_NEAR(std::abs(s[0] - Complex(std::cos(t / 2), 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1] - Complex(std::sin(t / 2), 0)), 0.0, 1e-15);
}

TEST(StateVector, ProbabilitiesOfSimpleStates) {
  auto p0 = probabilities(StateVector(1));
  EXPECT_DOUBLE_EQ(p0[0], 1.0);
  EXPECT_DOUBLE_EQ(p0[1], 0.0);
  Circuit c(1);
  c.add(Gate::h(0));
  auto p = probabilities(apply_circuit(StateVector(1), c));
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(StateVector, MatchesKroneckerOracleOnRandomCircuits) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4;
    Circuit c(n);
    for (int k = 0; k < 8; ++k) c.add(random_gate(rng, n, true));
    const auto u = oracle::circuit_matrix(c);
    for (int col = 0; col < (1 << n); ++col) {
      const auto s = apply_circuit(StateVector::basis(n, static_cast<std::uint64_t>(col)), c);
      for (int row = 0; row < (1 << n); ++row)
        ASSERT_NEAR(std::abs(s[static_cast<std::size_t>(row)] - u(row, col)), 0.0, 1e-12)
            << "trial " << trial << " col " << col;
    }
  }
}

TEST(StateVector, NormPreserved) {
  std::mt19937_64 rng(5);
  Circuit c(6);
  for (int k = 0; k < 200; ++k) c.add(random_gate(rng, 6, true));
  const auto s = apply_circuit(StateVector(6), c);
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
  double total = 0;
  for (double p : probabilities(s)) total += p;
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(StateVector, Errors) {
  Circuit c(2);
  EXPECT_THROW(c.add(Gate::x(2)), ValidationError);
  EXPECT_THROW(c.add(Gate::cnot(1, 1)), ValidationError);
  EXPECT_THROW(c.add(Gate::ry(0, std::nan(""))), ValidationError);
  EXPECT_THROW(apply_circuit(StateVector(3), c), ValidationError);
  EXPECT_THROW(StateVector(kMaxQubits + 1), ValidationError);
}

TEST(Sampling, DeterministicDistribution) {
  const auto t = sample_counts(StateVector(1), 100, 7);
  EXPECT_EQ(t.shots, 100u);
  EXPECT_EQ(t.count(0), 100u);
  EXPECT_EQ(t.by_bitstring().at("0"), 100u);
}

TEST(Sampling, UniformWithinBinomialBound) {
  Circuit c(1);
  c.add(Gate::h(0));
  const auto s = apply_circuit(StateVector(1), c);
  const auto t = sample_counts(s, 100000, 2024);
  EXPECT_LE(std::abs(static_cast<double>(t.count(0)) - 50000.0), 3 * std::sqrt(1e5 * 0.25));
}

TEST(Sampling, SameSeedSameTable) {
  std::mt19937_64 rng(3);
  Circuit c(5);
  for (int k = 0; k < 30; ++k) c.add(random_gate(rng, 5, false));
  const auto s = apply_circuit(StateVector(5), c);
  const auto a = sample_counts(s, 12345, 99);
  const auto b = sample_counts(s, 12345, 99);
  EXPECT_EQ(a.counts, b.counts);
  std::uint64_t total = 0;
  for (const auto& [o, n] : a.counts) total += n;
  EXPECT_EQ(total, a.shots);
  const auto other = sample_counts(s, 12345, 100);
  EXPECT_NE(a.counts, other.counts);
}

TEST(Sampling, FrequenciesConvergeOverSeeds) {
  std::mt19937_64 rng(8);
  Circuit c(3);
  for (int k = 0; k < 12; ++k) c.add(random_gate(rng, 3, false));
  const auto s = apply_circuit(StateVector(3), c);
  const auto p = probabilities(s);
  const double m = 20000;
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto t = sample_counts(s, static_cast<std::uint64_t>(m), derive_seed(1, seed));
    for (std::size_t o = 0; o < p.size(); ++o) {
      const double bound = 5 * std::sqrt(p[o] * (1 - p[o]) / m);
      if (std::abs(t.frequency(o) - p[o]) > bound + 1e-12) ++violations;
    }
  }
  EXPECT_EQ(violations, 0);
}

TEST(Sampling, BitstringsAreMostSignificantFirst) {
  EXPECT_EQ(to_bitstring(1, 4), "0001");
  EXPECT_EQ(to_bitstring(10, 5), "01010");
}

TEST(Unitary, EmptyAndX) {
  const auto id = unitary_of(Circuit(1));
  EXPECT_NEAR(oracle::max_abs(id - oracle::Mat::Identity(2, 2)), 0.0, 1e-15);
  Circuit c(1);
  c.add(Gate::x(0));
  EXPECT_NEAR(oracle::max_abs(unitary_of(c) - oracle::pauli_x()), 0.0, 1e-15);
}

TEST(Unitary, RandomFiveGateCircuit) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Circuit c(3);
    for (int k = 0; k < 5; ++k) c.add(random_gate(rng, 3, true));
    EXPECT_NEAR(oracle::max_abs(unitary_of(c) - oracle::circuit_matrix(c)), 0.0, 1e-12);
    EXPECT_LT(unitarity_defect(unitary_of(c)), 1e-10);
  }
  EXPECT_THROW(unitary_of(Circuit(kMaxUnitaryQubits + 1)), ValidationError);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}
