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

#include <Eigen/Dense>

#include "mp2q/circuit.hpp"

namespace mp2q {

inline constexpr int kMaxUnitaryQubits = 12;

// Column j is the circuit applied to |j>.
Eigen::MatrixXcd unitary_of(const Circuit& c);

// Unitary of a circuit acting on physical qubits, restricted to the logical
// subspace selected by `layout` (logical -> physical) with every other qubit
// starting in |0>. `leakage` receives the largest probability found outside
// that subspace over all inputs, i.e. how badly ancillas fail to return to |0>.
Eigen::MatrixXcd restricted_unitary(const Circuit& physical, const std::vector<int>& layout,
                                    double* leakage = nullptr);

// Max entrywise difference after removing the global phase, aligned on the
// largest-magnitude entry of `a`.
double phase_aligned_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// max |U^dagger U - I|.
double unitarity_defect(const Eigen::MatrixXcd& u);

}  // namespace mp2q
