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

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mp2q/circuit.hpp"

namespace mp2q {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 20;

// Qubit j is bit j of the basis index.
class StateVector {
 public:
  // |0...0> on n qubits.
  explicit StateVector(int n_qubits);
  static StateVector basis(int n_qubits, std::uint64_t index);
  static StateVector from_amplitudes(std::vector<Complex> amps);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  double norm_squared() const;

  void apply(const Gate& g);

 private:
  int n_qubits_;
  std::vector<Complex> amps_;
};

StateVector apply_circuit(StateVector state, const Circuit& circuit);

std::vector<double> probabilities(const StateVector& state);

// Outcomes are basis indices; bitstrings are rendered most significant
// qubit first.
struct CountsTable {
  int n_qubits = 0;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::map<std::uint64_t, std::uint64_t> counts;

  std::uint64_t count(std::uint64_t outcome) const;
  double frequency(std::uint64_t outcome) const;
  std::map<std::string, std::uint64_t> by_bitstring() const;
};

std::string to_bitstring(std::uint64_t value, int n_bits);

// Multinomial draw by inverse-CDF lookup of one uniform per shot.
CountsTable sample_counts(const StateVector& state, std::uint64_t shots, std::uint64_t seed);
CountsTable sample_counts(const std::vector<double>& probs, int n_qubits, std::uint64_t shots,
                          std::uint64_t seed);

}  // namespace mp2q
