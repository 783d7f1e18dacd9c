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

#include <string>
#include <vector>

#include "json.hpp"

namespace mp2q {

enum class GateKind { X, H, Rx, Ry, Rz, Swap, PauliXExp };

// Which control value activates a controlled gate.
enum class Polarity { Zero, One };

// One gate of the IR. Named constructors cover every gate the builders emit; every
// kind may additionally carry controls, which the simulator honours and the
// lowering pass decomposes.
//
// PauliXExp with angle phi over targets S is exp(i * phi * X^{(x)S}).
struct Gate {
  GateKind kind = GateKind::X;
  std::vector<int> targets;
  std::vector<int> controls;
  Polarity polarity = Polarity::One;
  double angle = 0.0;

  static Gate x(int q);
  static Gate h(int q);
  static Gate rx(int q, double theta);
  static Gate ry(int q, double theta);
  static Gate rz(int q, double theta);
  static Gate cnot(int control, int target);
  static Gate toffoli(int c1, int c2, int target);
  static Gate swap(int a, int b);
  static Gate cry(int control, int target, double theta, Polarity p = Polarity::One);
  static Gate mcry(std::vector<int> controls, int target, double theta,
                   Polarity p = Polarity::One);
  static Gate pauli_x_exp(std::vector<int> qubits, double phi);

  // Controls followed by targets.
  std::vector<int> qubits() const;
  bool touches(int q) const;
  bool is_native() const;
  bool is_cnot() const;
  bool is_toffoli() const;
  bool has_angle() const;
  Gate inverse() const;
  // Serialization name: CNOT, Toffoli, CRy, MCRy or the base kind.
  std::string name() const;
};

bool operator==(const Gate& a, const Gate& b);

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  const Gate& operator[](std::size_t i) const { return gates_[i]; }

  // Validates operands (distinct, in range) and finite angles.
  Circuit& add(Gate g);
  Circuit& append(const Circuit& other);

  Circuit inverse() const;
  // Every gate gains `control` with one-polarity. Gates with zero-polarity
  // controls are X-conjugated first so the combined control is uniform.
  Circuit controlled(int control) const;
  // Relabels qubit q to map[q] on a circuit of width n.
  Circuit remapped(const std::vector<int>& map, int n) const;

  std::size_t count_two_qubit() const;
  std::size_t count_if(bool (*pred)(const Gate&)) const;

 private:
  int n_qubits_ = 0;
  std::vector<Gate> gates_;
};

// Flat gate list: {"n_qubits": n, "gates": [{"kind","qubits","angle",...}]}.
nlohmann::json to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace mp2q
