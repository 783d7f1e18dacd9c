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

#include "mp2q/statevec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "mp2q/error.hpp"
#include "mp2q/rng.hpp"

namespace mp2q {

namespace {

using Mat2 = std::array<Complex, 4>;  // row-major

Mat2 matrix_of(const Gate& g) {
  const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
  const Complex i(0, 1);
  switch (g.kind) {
    case GateKind::X: return {0, 1, 1, 0};
    case GateKind::H: {
      const double r = 1 / std::sqrt(2.0);
      return {r, r, r, -r};
    }
    case GateKind::Rx: return {c, -i * s, -i * s, c};
    case GateKind::Ry: return {c, -s, s, c};
    case GateKind::Rz: return {std::exp(-i * (g.angle / 2)), 0, 0, std::exp(i * (g.angle / 2))};
    default: break;
  }
  throw ValidationError("no 2x2 matrix for " + g.name());
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0 || n_qubits > kMaxQubits)
    throw ValidationError("state vector supports 0.." + std::to_string(kMaxQubits) +
                          " qubits, got " + std::to_string(n_qubits));
  amps_.assign(std::size_t{1} << n_qubits, Complex(0));
  amps_[0] = 1;
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw ValidationError("basis index out of range");
  s.amps_[0] = 0;
  s.amps_[index] = 1;
  return s;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amps) {
  const std::size_t d = amps.size();
  if (d == 0 || (d & (d - 1)) != 0)
    throw ValidationError("amplitude vector length must be a power of two");
  StateVector s(std::countr_zero(d));
  s.amps_ = std::move(amps);
  return s;
}

double StateVector::norm_squared() const {
  double n = 0;
  for (const auto& a : amps_) n += std::norm(a);
  return n;
}

void StateVector::apply(const Gate& g) {
  for (int q : g.qubits())
    if (q < 0 || q >= n_qubits_)
      throw ValidationError("gate operand " + std::to_string(q) + " out of range");
  std::uint64_t cmask = 0;
  for (int c : g.controls) cmask |= std::uint64_t{1} << c;
  const std::uint64_t cval = g.polarity == Polarity::One ? cmask : 0;
  const std::size_t dim = amps_.size();

  if (g.kind == GateKind::Swap) {
    const std::uint64_t a = std::uint64_t{1} << g.targets[0];
    const std::uint64_t b = std::uint64_t{1} << g.targets[1];
    for (std::size_t k = 0; k < dim; ++k)
      if ((k & a) && !(k & b) && (k & cmask) == cval) std::swap(amps_[k], amps_[k ^ a ^ b]);
    return;
  }
  if (g.kind == GateKind::PauliXExp) {
    std::uint64_t m = 0;
    for (int t : g.targets) m |= std::uint64_t{1} << t;
    const std::uint64_t top = std::uint64_t{1} << std::bit_width(m) >> 1;
    const Complex c(std::cos(g.angle), 0), is(0, std::sin(g.angle));
    for (std::size_t k = 0; k < dim; ++k) {
      if ((k & top) || (k & cmask) != cval) continue;
      const std::size_t l = k ^ m;
      const Complex a = amps_[k], b = amps_[l];
      amps_[k] = c * a + is * b;
      amps_[l] = is * a + c * b;
    }
    return;
  }
  const Mat2 u = matrix_of(g);
  const std::uint64_t t = std::uint64_t{1} << g.targets[0];
  for (std::size_t k = 0; k < dim; ++k) {
    if ((k & t) || (k & cmask) != cval) continue;
    const Complex a0 = amps_[k], a1 = amps_[k | t];
    amps_[k] = u[0] * a0 + u[1] * a1;
    amps_[k | t] = u[2] * a0 + u[3] * a1;
  }
}

StateVector apply_circuit(StateVector state, const Circuit& circuit) {
  if (circuit.n_qubits() != state.n_qubits())
    throw ValidationError("circuit has " + std::to_string(circuit.n_qubits()) +
                          " qubits, state has " + std::to_string(state.n_qubits()));
  for (const auto& g : circuit.gates()) state.apply(g);
  return state;
}

std::vector<double> probabilities(const StateVector& state) {
  std::vector<double> p(state.dim());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state[i]);
  return p;
}

std::uint64_t CountsTable::count(std::uint64_t outcome) const {
  auto it = counts.find(outcome);
  return it == counts.end() ? 0 : it->second;
}

double CountsTable::frequency(std::uint64_t outcome) const {
  return shots == 0 ? 0.0 : static_cast<double>(count(outcome)) / static_cast<double>(shots);
}

std::map<std::string, std::uint64_t> CountsTable::by_bitstring() const {
  std::map<std::string, std::uint64_t> out;
  for (const auto& [k, v] : counts) out[to_bitstring(k, n_qubits)] = v;
  return out;
}

std::string to_bitstring(std::uint64_t value, int n_bits) {
  std::string s(static_cast<std::size_t>(n_bits), '0');
  for (int j = 0; j < n_bits; ++j)
    if (value >> j & 1) s[static_cast<std::size_t>(n_bits - 1 - j)] = '1';
  return s;
}

CountsTable sample_counts(const std::vector<double>& probs, int n_qubits, std::uint64_t shots,
                          std::uint64_t seed) {
  if (shots == 0) throw ValidationError("shots must be positive");
  std::vector<double> cdf(probs.size());
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += std::max(0.0, probs[i]);
    cdf[i] = acc;
  }
  if (!(acc > 0)) throw NumericalError("probability vector sums to zero");
  // The last nonzero entry absorbs rounding so every draw lands somewhere.
  std::size_t last = probs.size();
  while (last > 0 && !(probs[last - 1] > 0)) --last;
  for (std::size_t i = last - 1; i < cdf.size(); ++i) cdf[i] = acc;

  CountsTable t;
  t.n_qubits = n_qubits;
  t.shots = shots;
  t.seed = seed;
  Rng rng(seed);
  std::vector<std::uint64_t> hist(probs.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ++hist[static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf.begin(), static_cast<std::ptrdiff_t>(last - 1)))];
  }
  for (std::size_t i = 0; i < hist.size(); ++i)
    if (hist[i]) t.counts[i] = hist[i];
  return t;
}

CountsTable sample_counts(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
  return sample_counts(probabilities(state), state.n_qubits(), shots, seed);
}

}  // namespace mp2q
