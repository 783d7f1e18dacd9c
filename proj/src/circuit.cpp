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

#include "mp2q/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mp2q/error.hpp"

namespace mp2q {

namespace {

Gate make(GateKind kind, std::vector<int> targets, double angle = 0.0) {
  Gate g;
  g.kind = kind;
  g.targets = std::move(targets);
  g.angle = angle;
  return g;
}

const char* kind_name(GateKind k) {
  switch (k) {
    case GateKind::X: return "X";
    case GateKind::H: return "H";
    case GateKind::Rx: return "Rx";
    case GateKind::Ry: return "Ry";
    case GateKind::Rz: return "Rz";
    case GateKind::Swap: return "SWAP";
    case GateKind::PauliXExp: return "PauliXExp";
  }
  return "?";
}

}  // namespace

Gate Gate::x(int q) { return make(GateKind::X, {q}); }
Gate Gate::h(int q) { return make(GateKind::H, {q}); }
Gate Gate::rx(int q, double theta) { return make(GateKind::Rx, {q}, theta); }
Gate Gate::ry(int q, double theta) { return make(GateKind::Ry, {q}, theta); }
Gate Gate::rz(int q, double theta) { return make(GateKind::Rz, {q}, theta); }

Gate Gate::cnot(int control, int target) {
  Gate g = make(GateKind::X, {target});
  g.controls = {control};
  return g;
}

Gate Gate::toffoli(int c1, int c2, int target) {
  Gate g = make(GateKind::X, {target});
  g.controls = {c1, c2};
  return g;
}

Gate Gate::swap(int a, int b) { return make(GateKind::Swap, {a, b}); }

Gate Gate::cry(int control, int target, double theta, Polarity p) {
  Gate g = make(GateKind::Ry, {target}, theta);
  g.controls = {control};
  g.polarity = p;
  return g;
}

Gate Gate::mcry(std::vector<int> controls, int target, double theta, Polarity p) {
  Gate g = make(GateKind::Ry, {target}, theta);
  g.controls = std::move(controls);
  g.polarity = p;
  return g;
}

Gate Gate::pauli_x_exp(std::vector<int> qubits, double phi) {
  return make(GateKind::PauliXExp, std::move(qubits), phi);
}

std::vector<int> Gate::qubits() const {
  std::vector<int> q = controls;
  q.insert(q.end(), targets.begin(), targets.end());
  return q;
}

bool Gate::touches(int q) const {
  return std::find(targets.begin(), targets.end(), q) != targets.end() ||
         std::find(controls.begin(), controls.end(), q) != controls.end();
}

bool Gate::is_cnot() const {
  return kind == GateKind::X && controls.size() == 1 && polarity == Polarity::One;
}

bool Gate::is_toffoli() const {
  return kind == GateKind::X && controls.size() == 2 && polarity == Polarity::One;
}

bool Gate::is_native() const {
  if (is_cnot()) return true;
  if (!controls.empty()) return false;
  switch (kind) {
    case GateKind::X:
    case GateKind::H:
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
      return true;
    default:
      return false;
  }
}

bool Gate::has_angle() const {
  return kind == GateKind::Rx || kind == GateKind::Ry || kind == GateKind::Rz ||
         kind == GateKind::PauliXExp;
}

Gate Gate::inverse() const {
  Gate g = *this;
  if (has_angle()) g.angle = -angle;
  return g;
}

std::string Gate::name() const {
  if (kind == GateKind::X && controls.size() == 1) return "CNOT";
  if (kind == GateKind::X && controls.size() == 2) return "Toffoli";
  if (kind == GateKind::Ry && controls.size() == 1) return "CRy";
  if (kind == GateKind::Ry && controls.size() >= 2) return "MCRy";
  return kind_name(kind);
}

bool operator==(const Gate& a, const Gate& b) {
  return a.kind == b.kind && a.targets == b.targets && a.controls == b.controls &&
         a.polarity == b.polarity && a.angle == b.angle;
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 0) throw ValidationError("negative qubit count");
}

Circuit& Circuit::add(Gate g) {
  if (g.targets.empty()) throw ValidationError("gate without targets");
  if (g.kind == GateKind::Swap && g.targets.size() != 2)
    throw ValidationError("SWAP needs exactly two targets");
  if (g.kind != GateKind::Swap && g.kind != GateKind::PauliXExp && g.targets.size() != 1)
    throw ValidationError(g.name() + " takes one target");
  std::set<int> seen;
  for (int q : g.qubits()) {
    if (q < 0 || q >= n_qubits_)
      throw ValidationError("qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(n_qubits_) + "-qubit circuit");
    if (!seen.insert(q).second)
      throw ValidationError("repeated operand " + std::to_string(q) + " in " + g.name());
  }
  if (!std::isfinite(g.angle)) throw ValidationError("non-finite gate angle");
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits_ > n_qubits_) throw ValidationError("appending a wider circuit");
  for (const auto& g : other.gates_) add(g);
  return *this;
}

Circuit Circuit::inverse() const {
  Circuit out(n_qubits_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.add(it->inverse());
  return out;
}

Circuit Circuit::controlled(int control) const {
  Circuit out(n_qubits_);
  for (const auto& g : gates_) {
    if (g.touches(control))
      throw ValidationError("control qubit " + std::to_string(control) +
                            " is an operand of " + g.name());
    const bool flip = g.polarity == Polarity::Zero && !g.controls.empty();
    if (flip)
      for (int c : g.controls) out.add(Gate::x(c));
    Gate cg = g;
    cg.polarity = Polarity::One;
    cg.controls.push_back(control);
    out.add(cg);
    if (flip)
      for (int c : g.controls) out.add(Gate::x(c));
  }
  return out;
}

Circuit Circuit::remapped(const std::vector<int>& map, int n) const {
  if (static_cast<int>(map.size()) < n_qubits_)
    throw ValidationError("qubit map shorter than circuit width");
  Circuit out(n);
  for (Gate g : gates_) {
    for (int& q : g.targets) q = map[q];
    for (int& q : g.controls) q = map[q];
    out.add(std::move(g));
  }
  return out;
}

std::size_t Circuit::count_two_qubit() const {
  return static_cast<std::size_t>(std::count_if(
      gates_.begin(), gates_.end(), [](const Gate& g) { return g.qubits().size() >= 2; }));
}

std::size_t Circuit::count_if(bool (*pred)(const Gate&)) const {
  return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), pred));
}

nlohmann::json to_json(const Circuit& c) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : c.gates()) {
    nlohmann::json jg;
    const std::string name = g.name();
    jg["kind"] = name;
    const bool named_controlled =
        name == "CNOT" || name == "Toffoli" || name == "CRy" || name == "MCRy";
    if (named_controlled) {
      jg["qubits"] = g.qubits();
    } else {
      jg["qubits"] = g.targets;
      if (!g.controls.empty()) jg["controls"] = g.controls;
    }
    if (!g.controls.empty() && g.polarity == Polarity::Zero) jg["polarity"] = "zero";
    if (g.has_angle()) jg["angle"] = g.angle;
    gates.push_back(jg);
  }
  return {{"n_qubits", c.n_qubits()}, {"gates", gates}};
}

Circuit circuit_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n_qubits") || !j.contains("gates"))
    throw ValidationError("circuit JSON needs n_qubits and gates");
  Circuit c(j.at("n_qubits").get<int>());
  for (const auto& jg : j.at("gates")) {
    const std::string kind = jg.at("kind").get<std::string>();
    const auto q = jg.at("qubits").get<std::vector<int>>();
    const double angle = jg.value("angle", 0.0);
    Polarity pol = Polarity::One;
    if (jg.contains("polarity")) {
      const auto p = jg.at("polarity").get<std::string>();
      if (p == "zero") pol = Polarity::Zero;
      else if (p != "one") throw ValidationError("polarity must be \"zero\" or \"one\"");
    }
    auto need = [&](std::size_t n) {
      if (q.size() != n)
        throw ValidationError(kind + " expects " + std::to_string(n) + " qubits");
    };
    Gate g;
    if (kind == "CNOT") {
      need(2);
      g = Gate::cnot(q[0], q[1]);
    } else if (kind == "Toffoli") {
      need(3);
      g = Gate::toffoli(q[0], q[1], q[2]);
    } else if (kind == "CRy") {
      need(2);
      g = Gate::cry(q[0], q[1], angle);
    } else if (kind == "MCRy") {
      if (q.size() < 2) throw ValidationError("MCRy expects controls and a target");
      g = Gate::mcry(std::vector<int>(q.begin(), q.end() - 1), q.back(), angle);
    } else if (kind == "SWAP") {
      need(2);
      g = Gate::swap(q[0], q[1]);
    } else if (kind == "PauliXExp") {
      g = Gate::pauli_x_exp(q, angle);
    } else if (kind == "X" || kind == "H" || kind == "Rx" || kind == "Ry" || kind == "Rz") {
      need(1);
      if (kind == "X") g = Gate::x(q[0]);
      if (kind == "H") g = Gate::h(q[0]);
      if (kind == "Rx") g = Gate::rx(q[0], angle);
      if (kind == "Ry") g = Gate::ry(q[0], angle);
      if (kind == "Rz") g = Gate::rz(q[0], angle);
    } else {
      throw ValidationError("unknown gate kind \"" + kind + "\"");
    }
    if (jg.contains("controls")) {
      const auto extra = jg.at("controls").get<std::vector<int>>();
      g.controls.insert(g.controls.end(), extra.begin(), extra.end());
    }
    g.polarity = pol;
    c.add(std::move(g));
  }
  return c;
}

}  // namespace mp2q
