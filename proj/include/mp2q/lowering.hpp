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

#include <cstddef>
#include <vector>

#include "mp2q/circuit.hpp"
#include "mp2q/coupling.hpp"
#include "mp2q/error.hpp"

namespace mp2q {

// No ancilla/edge assignment exists for a gate.
class LoweringError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct Violation {
  std::size_t gate_index;
  int a;
  int b;
};

std::vector<int> identity_layout(int n);

// Rewrites `circuit` into {X, H, Rx, Ry, Rz, CNOT} over coupling.n_qubits()
// physical qubits. Logical qubit j lives on layout[j]; physical qubits
// outside the layout image are ancillas, assumed |0> and returned to |0>.
//
// Multi-controlled gates are lowered over a minimum-CNOT tree rooted at the
// target whose internal nodes are ancillas and whose leaves are the
// controls; every tree edge is a coupling edge. Toffolis computing and
// uncomputing a tree node form a pair and use the control-free halves of
// the standard decomposition, so no CNOT ever joins two controls.
Circuit lower(const Circuit& circuit, const CouplingMap& coupling, const std::vector<int>& layout);

// Replaces each Toffoli pair (identical operands, no gate touching either
// control in between) by the pair-cancelled native form. Everything else is
// left as is.
Circuit simplify_toffoli_pairs(const Circuit& circuit);

// H-conjugated CNOT ladder with one Rz(-2 phi). Qubits follow the
// lexicographically first ordering whose consecutive pairs are edges; if no
// such chain exists a spanning tree of the induced subgraph is used, and
// failing that a tree through relay qubits outside the string.
Circuit lower_pauli_x_exp(const Gate& gate, const CouplingMap& coupling,
                          const std::vector<int>& layout);

std::vector<Violation> validate_connectivity(const Circuit& circuit, const CouplingMap& coupling);

// Halves of the Toffoli decomposition: Toffoli = D after W, where W holds
// every gate touching the target and D is diagonal on the controls. A pair
// Toffoli ... Toffoli lowers to W ... W^dagger.
void append_toffoli_w(Circuit& c, int c1, int c2, int target, bool dagger);
void append_toffoli_d(Circuit& c, int c1, int c2);

}  // namespace mp2q
