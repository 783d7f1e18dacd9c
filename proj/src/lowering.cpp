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

#include "mp2q/lowering.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>

namespace mp2q {

namespace {

constexpr double kT = std::numbers::pi / 4;  // T = Rz(pi/4) up to phase

std::uint64_t bit(int q) { return std::uint64_t{1} << q; }

// ---------------------------------------------------------------------------
// Toffoli pairing

// partner[i] = j when gates i < j form a Toffoli pair.
std::vector<long> toffoli_partners(const Circuit& c,
                                   const std::function<bool(const Gate&)>& eligible) {
  std::vector<long> partner(c.size(), -1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c[i];
    if (!g.is_toffoli() || partner[i] >= 0 || !eligible(g)) continue;
    const int c1 = g.controls[0], c2 = g.controls[1];
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const Gate& h = c[j];
      if (!h.touches(c1) && !h.touches(c2)) continue;
      const bool same = h.is_toffoli() && h.targets == g.targets &&
                        std::is_permutation(h.controls.begin(), h.controls.end(),
                                            g.controls.begin());
      if (same && partner[j] < 0) {
        partner[i] = static_cast<long>(j);
        partner[j] = static_cast<long>(i);
      }
      break;
    }
  }
  return partner;
}

// ---------------------------------------------------------------------------
// Ancilla tree search

struct Tree {
  int q = -1;
  std::vector<Tree> kids;
};

struct Found {
  int cost = 0;
  Tree tree;
  std::uint64_t used = 0;
};

constexpr int kCostRelay = 2;  // CNOT compute + uncompute
constexpr int kCostPair = 8;   // W + W^dagger

enum class RootKind { Rotation, Flip };

class TreeSearch {
 public:
  TreeSearch(const CouplingMap& m, std::vector<int> controls, std::uint64_t blocked)
      : m_(m), controls_(std::move(controls)), blocked_(blocked) {
    for (int c : controls_) control_mask_ |= bit(c);
    max_depth_ = static_cast<int>(controls_.size()) + 3;
  }

  // Best tree rooted at `target`; nullopt when none exists.
  std::optional<Found> root(int target, RootKind kind) {
    const unsigned all = (1u << controls_.size()) - 1;
    const int one_cost = kind == RootKind::Flip ? 1 : 2;
    const int two_cost = kind == RootKind::Flip ? 6 : 8;
    std::optional<Found> best;
    int bound = std::numeric_limits<int>::max();
    const auto& nb = m_.neighbors(target);
    for (int w : nb) {
      if (one_cost >= bound) break;
      auto r = feeder(w, all, 0, 1, bound - one_cost);
      if (r && r->cost + one_cost < bound) {
        bound = r->cost + one_cost;
        best = Found{bound, Tree{target, {r->tree}}, r->used};
      }
    }
    if (controls_.size() >= 2) {
      for_each_split(all, [&](unsigned s1, unsigned s2) {
        for (int w1 : nb)
          for (int w2 : nb) {
            if (w1 == w2 || two_cost >= bound) continue;
            if (kind == RootKind::Flip && !m_.has_edge(w1, w2)) continue;
            auto r1 = feeder(w1, s1, 0, 1, bound - two_cost);
            if (!r1) continue;
            auto r2 = feeder(w2, s2, r1->used, 1, bound - two_cost - r1->cost);
            if (!r2) continue;
            const int total = two_cost + r1->cost + r2->cost;
            if (total < bound) {
              bound = total;
              best = Found{total, Tree{target, {r1->tree, r2->tree}}, r2->used};
            }
          }
      });
    }
    return best;
  }

 private:
  template <class F>
  static void for_each_split(unsigned s, F&& f) {
    const unsigned low = s & (~s + 1);
    const unsigned rest = s ^ low;
    // s1 always holds the lowest member; enumerate subsets of the rest.
    for (unsigned sub = rest;; sub = (sub - 1) & rest) {
      const unsigned s1 = low | sub;
      if (s1 != s) f(s1, s ^ s1);
      if (sub == 0) break;
    }
  }

  std::optional<Found> feeder(int u, unsigned s, std::uint64_t used, int depth, int bound) {
    if (bound <= 0) return std::nullopt;
    if (std::popcount(s) == 1 && controls_[static_cast<std::size_t>(std::countr_zero(s))] == u)
      return Found{0, Tree{u, {}}, used};
    if ((control_mask_ | blocked_ | used) & bit(u)) return std::nullopt;
    if (depth >= max_depth_) return std::nullopt;
    const std::uint64_t here = used | bit(u);
    std::optional<Found> best;
    const auto& nb = m_.neighbors(u);
    if (std::popcount(s) >= 2) {
      for_each_split(s, [&](unsigned s1, unsigned s2) {
        for (int w1 : nb)
          for (int w2 : nb) {
            if (w1 == w2 || kCostPair >= bound) continue;
            auto r1 = feeder(w1, s1, here, depth + 1, bound - kCostPair);
            if (!r1) continue;
            auto r2 = feeder(w2, s2, r1->used, depth + 1, bound - kCostPair - r1->cost);
            if (!r2) continue;
            const int total = kCostPair + r1->cost + r2->cost;
            if (total < bound) {
              bound = total;
              best = Found{total, Tree{u, {r1->tree, r2->tree}}, r2->used};
            }
          }
      });
    }
    for (int w : nb) {
      if (kCostRelay >= bound) break;
      auto r = feeder(w, s, here, depth + 1, bound - kCostRelay);
      if (r && r->cost + kCostRelay < bound) {
        bound = r->cost + kCostRelay;
        best = Found{bound, Tree{u, {r->tree}}, r->used};
      }
    }
    return best;
  }

  const CouplingMap& m_;
  std::vector<int> controls_;
  std::uint64_t blocked_;
  std::uint64_t control_mask_ = 0;
  int max_depth_ = 0;
};

void emit_compute(Circuit& out, const Tree& n) {
  for (const auto& k : n.kids)
    if (!k.kids.empty()) emit_compute(out, k);
  if (n.kids.size() == 1) out.add(Gate::cnot(n.kids[0].q, n.q));
  if (n.kids.size() == 2) append_toffoli_w(out, n.kids[0].q, n.kids[1].q, n.q, false);
}

void emit_uncompute(Circuit& out, const Tree& n) {
  if (n.kids.size() == 1) out.add(Gate::cnot(n.kids[0].q, n.q));
  if (n.kids.size() == 2) append_toffoli_w(out, n.kids[0].q, n.kids[1].q, n.q, true);
  for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it)
    if (!it->kids.empty()) emit_uncompute(out, *it);
}

// ---------------------------------------------------------------------------
// Parity fan-in for X strings

// CNOT (from, to) pairs in compute order; the parity ends on `root`.
struct FanIn {
  std::vector<std::pair<int, int>> cnots;
  int root = -1;
};

FanIn parity_fan_in(std::vector<int> qs, const CouplingMap& m, bool allow_relay) {
  std::sort(qs.begin(), qs.end());
  FanIn f;
  if (qs.size() == 1) {
    f.root = qs[0];
    return f;
  }
  const std::set<int> members(qs.begin(), qs.end());
  // Lexicographically first Hamiltonian path of the induced subgraph.
  std::vector<int> chain;
  std::set<int> on_chain;
  std::function<bool()> extend = [&]() {
    if (chain.size() == qs.size()) return true;
    for (int w : m.neighbors(chain.back())) {
      if (!members.count(w) || on_chain.count(w)) continue;
      chain.push_back(w);
      on_chain.insert(w);
      if (extend()) return true;
      on_chain.erase(w);
      chain.pop_back();
    }
    return false;
  };
  for (int start : qs) {
    chain = {start};
    on_chain = {start};
    if (extend()) {
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) f.cnots.emplace_back(chain[i], chain[i + 1]);
      f.root = chain.back();
      return f;
    }
  }
  // Spanning tree of the induced subgraph, BFS from the smallest qubit,
  // leaves folded in first.
  std::vector<int> order{qs[0]};
  std::map<int, int> parent{{qs[0], -1}};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int w : m.neighbors(order[i]))
      if (members.count(w) && !parent.count(w)) {
        parent[w] = order[i];
        order.push_back(w);
      }
  if (order.size() == qs.size()) {
    for (auto it = order.rbegin(); it + 1 != order.rend(); ++it) f.cnots.emplace_back(*it, parent[*it]);
    f.root = qs[0];
    return f;
  }
  std::string names;
  for (int q : qs) names += (names.empty() ? "" : ",") + std::to_string(q);
  if (!allow_relay)
    throw LoweringError("X string on qubits {" + names + "} is not connected in the coupling map");
  // Steiner tree through non-string relay qubits: repeatedly attach the
  // nearest unattached string qubit by a shortest path.
  std::map<int, int> up{{qs[0], -1}};
  std::set<int> remaining(qs.begin() + 1, qs.end());
  while (!remaining.empty()) {
    std::map<int, int> via;
    std::vector<int> frontier;
    for (const auto& [v, p] : up) {
      via[v] = -1;
      frontier.push_back(v);
    }
    int hit = -1;
    for (std::size_t i = 0; i < frontier.size() && hit < 0; ++i)
      for (int w : m.neighbors(frontier[i]))
        if (!via.count(w)) {
          via[w] = frontier[i];
          frontier.push_back(w);
          if (remaining.count(w)) {
            hit = w;
            break;
          }
        }
    if (hit < 0) throw LoweringError("X string on qubits {" + names + "} is not connected in the coupling map");
    for (int v = hit; !up.count(v); v = via[v]) up[v] = via[v];
    remaining.erase(hit);
  }
  std::map<int, std::vector<int>> kids;
  for (const auto& [v, p] : up)
    if (p >= 0) kids[p].push_back(v);
  // A relay's own bit enters its parent twice and cancels.
  std::function<void(int)> fold = [&](int v) {
    const int p = up[v];
    const bool relay = !members.count(v);
    if (relay) f.cnots.emplace_back(v, p);
    for (int k : kids[v]) fold(k);
    f.cnots.emplace_back(v, p);
  };
  for (int k : kids[qs[0]]) fold(k);
  f.root = qs[0];
  return f;
}

// BFS spanning tree of the induced subgraph rooted at `root`.
FanIn rooted_fan_in(const std::vector<int>& qs, const CouplingMap& m, int root) {
  const std::set<int> members(qs.begin(), qs.end());
  std::vector<int> order{root};
  std::map<int, int> parent{{root, -1}};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int w : m.neighbors(order[i]))
      if (members.count(w) && !parent.count(w)) {
        parent[w] = order[i];
        order.push_back(w);
      }
  FanIn f;
  f.root = root;
  if (order.size() != qs.size()) return parity_fan_in(qs, m, false);
  for (auto it = order.rbegin(); it + 1 != order.rend(); ++it) f.cnots.emplace_back(*it, parent[*it]);
  return f;
}

// ---------------------------------------------------------------------------

class Lowerer {
 public:
  Lowerer(const CouplingMap& m, std::uint64_t data_mask)
      : m_(m), data_mask_(data_mask), out_(m.n_qubits()) {}

  Circuit take() { return std::move(out_); }

  void cnot(int c, int t, std::size_t where) {
    if (m_.has_edge(c, t)) {
      out_.add(Gate::cnot(c, t));
      return;
    }
    controlled_x({c}, t, where);
  }

  void gate(const Gate& g, std::size_t where) {
    if (g.controls.empty()) {
      uncontrolled(g, where);
      return;
    }
    const bool flip = g.polarity == Polarity::Zero;
    if (flip)
      for (int c : g.controls) out_.add(Gate::x(c));
    switch (g.kind) {
      case GateKind::X:
        if (g.controls.size() == 1 && m_.has_edge(g.controls[0], g.targets[0]))
          out_.add(Gate::cnot(g.controls[0], g.targets[0]));
        else
          controlled_x(g.controls, g.targets[0], where);
        break;
      case GateKind::Ry:
      case GateKind::Rx:
      case GateKind::Rz:
        controlled_rotation(g.kind, g.controls, g.targets[0], g.angle, where);
        break;
      case GateKind::PauliXExp: {
        // Relays would be dirty while the controlled rotation borrows ancillas,
        // and the parity root must be reachable from the controls.
        const FanIn f = reachable_fan_in(g.targets, g.controls, where);
        for (int q : g.targets) out_.add(Gate::h(q));
        for (auto [a, b] : f.cnots) out_.add(Gate::cnot(a, b));
        controlled_rotation(GateKind::Rz, g.controls, f.root, -2 * g.angle, where);
        for (auto it = f.cnots.rbegin(); it != f.cnots.rend(); ++it) out_.add(Gate::cnot(it->first, it->second));
        for (int q : g.targets) out_.add(Gate::h(q));
        break;
      }
      case GateKind::Swap: {
        const int a = g.targets[0], b = g.targets[1];
        cnot(b, a, where);
        std::vector<int> cs = g.controls;
        cs.push_back(a);
        controlled_x(cs, b, where);
        cnot(b, a, where);
        break;
      }
      case GateKind::H:
        throw LoweringError("gate " + std::to_string(where) + ": controlled H is not supported");
    }
    if (flip)
      for (int c : g.controls) out_.add(Gate::x(c));
  }

  FanIn reachable_fan_in(const std::vector<int>& qs, const std::vector<int>& controls, std::size_t where) {
    std::vector<FanIn> options{parity_fan_in(qs, m_, false)};
    std::vector<int> sorted = qs;
    std::sort(sorted.begin(), sorted.end());
    for (int r : sorted) options.push_back(rooted_fan_in(sorted, m_, r));
    for (const auto& f : options) {
      try {
        plan(controls, f.root, RootKind::Rotation, where);
        return f;
      } catch (const LoweringError&) {
      }
    }
    return options.front();
  }

  void toffoli_half(const Gate& g, bool dagger) {
    append_toffoli_w(out_, g.controls[0], g.controls[1], g.targets[0], dagger);
  }

 private:
  void uncontrolled(const Gate& g, std::size_t where) {
    switch (g.kind) {
      case GateKind::Swap: {
        const int a = g.targets[0], b = g.targets[1];
        cnot(a, b, where);
        cnot(b, a, where);
        cnot(a, b, where);
        return;
      }
      case GateKind::PauliXExp: {
        if (g.targets.size() == 1) {
          out_.add(Gate::rx(g.targets[0], -2 * g.angle));
          return;
        }
        const FanIn f = parity_fan_in(g.targets, m_, true);
        for (int q : g.targets) out_.add(Gate::h(q));
        for (auto [a, b] : f.cnots) out_.add(Gate::cnot(a, b));
        out_.add(Gate::rz(f.root, -2 * g.angle));
        for (auto it = f.cnots.rbegin(); it != f.cnots.rend(); ++it) out_.add(Gate::cnot(it->first, it->second));
        for (int q : g.targets) out_.add(Gate::h(q));
        return;
      }
      default:
        out_.add(g);
    }
  }

  Found plan(const std::vector<int>& controls, int target, RootKind kind, std::size_t where) {
    std::uint64_t blocked = data_mask_ | bit(target);
    TreeSearch search(m_, controls, blocked);
    auto r = search.root(target, kind);
    if (!r) {
      std::string s;
      for (int c : controls) s += (s.empty() ? "" : ",") + std::to_string(c);
      throw LoweringError("gate " + std::to_string(where) + ": no ancilla/edge assignment for " +
                          std::to_string(controls.size()) + " controls {" + s + "} on target " +
                          std::to_string(target) + " in " + m_.name());
    }
    return *r;
  }

  void controlled_x(const std::vector<int>& controls, int target, std::size_t where) {
    const Found f = plan(controls, target, RootKind::Flip, where);
    const Tree& root = f.tree;
    for (const auto& k : root.kids)
      if (!k.kids.empty()) emit_compute(out_, k);
    if (root.kids.size() == 1) {
      out_.add(Gate::cnot(root.kids[0].q, target));
    } else {
      append_toffoli_w(out_, root.kids[0].q, root.kids[1].q, target, false);
      append_toffoli_d(out_, root.kids[0].q, root.kids[1].q);
    }
    for (auto it = root.kids.rbegin(); it != root.kids.rend(); ++it)
      if (!it->kids.empty()) emit_uncompute(out_, *it);
  }

  void controlled_rotation(GateKind kind, const std::vector<int>& controls, int target,
                           double theta, std::size_t where) {
    // Rx = Rz(-pi/2) Ry Rz(pi/2) and Rz = H Rx H reduce everything to Ry.
    if (kind == GateKind::Rz) out_.add(Gate::h(target));
    if (kind != GateKind::Ry) out_.add(Gate::rz(target, std::numbers::pi / 2));

    const Found f = plan(controls, target, RootKind::Rotation, where);
    const Tree& root = f.tree;
    for (const auto& k : root.kids)
      if (!k.kids.empty()) emit_compute(out_, k);
    out_.add(Gate::ry(target, theta / 2));
    if (root.kids.size() == 1) {
      out_.add(Gate::cnot(root.kids[0].q, target));
      out_.add(Gate::ry(target, -theta / 2));
      out_.add(Gate::cnot(root.kids[0].q, target));
    } else {
      append_toffoli_w(out_, root.kids[0].q, root.kids[1].q, target, false);
      out_.add(Gate::ry(target, -theta / 2));
      append_toffoli_w(out_, root.kids[0].q, root.kids[1].q, target, true);
    }
    for (auto it = root.kids.rbegin(); it != root.kids.rend(); ++it)
      if (!it->kids.empty()) emit_uncompute(out_, *it);

    if (kind != GateKind::Ry) out_.add(Gate::rz(target, -std::numbers::pi / 2));
    if (kind == GateKind::Rz) out_.add(Gate::h(target));
  }

  const CouplingMap& m_;
  std::uint64_t data_mask_;
  Circuit out_;
};

}  // namespace

void append_toffoli_w(Circuit& c, int c1, int c2, int t, bool dagger) {
  Circuit w(c.n_qubits());
  w.add(Gate::h(t));
  w.add(Gate::cnot(c2, t));
  w.add(Gate::rz(t, -kT));
  w.add(Gate::cnot(c1, t));
  w.add(Gate::rz(t, kT));
  w.add(Gate::cnot(c2, t));
  w.add(Gate::rz(t, -kT));
  w.add(Gate::cnot(c1, t));
  w.add(Gate::rz(t, kT));
  w.add(Gate::h(t));
  c.append(dagger ? w.inverse() : w);
}

void append_toffoli_d(Circuit& c, int c1, int c2) {
  c.add(Gate::rz(c2, kT));
  c.add(Gate::rz(c1, kT));
  c.add(Gate::cnot(c1, c2));
  c.add(Gate::rz(c2, -kT));
  c.add(Gate::cnot(c1, c2));
}

std::vector<int> identity_layout(int n) {
  std::vector<int> l(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) l[static_cast<std::size_t>(i)] = i;
  return l;
}

Circuit lower(const Circuit& circuit, const CouplingMap& coupling, const std::vector<int>& layout) {
  if (static_cast<int>(layout.size()) != circuit.n_qubits())
    throw ValidationError("layout has " + std::to_string(layout.size()) + " entries for a " +
                          std::to_string(circuit.n_qubits()) + "-qubit circuit");
  if (coupling.n_qubits() > 64) throw ValidationError("coupling maps above 64 qubits unsupported");
  std::uint64_t data = 0;
  for (int p : layout) {
    if (p < 0 || p >= coupling.n_qubits())
      throw ValidationError("layout maps onto qubit " + std::to_string(p) + " outside " +
                            coupling.name());
    if (data & bit(p)) throw ValidationError("layout is not injective");
    data |= bit(p);
  }
  const Circuit phys = circuit.remapped(layout, coupling.n_qubits());
  const auto partner = toffoli_partners(phys, [&](const Gate& g) {
    return coupling.has_edge(g.controls[0], g.targets[0]) &&
           coupling.has_edge(g.controls[1], g.targets[0]);
  });
  Lowerer lw(coupling, data);
  for (std::size_t i = 0; i < phys.size(); ++i) {
    const Gate& g = phys[i];
    if (partner[i] >= 0)
      lw.toffoli_half(g, static_cast<std::size_t>(partner[i]) < i);
    else
      lw.gate(g, i);
  }
  return lw.take();
}

Circuit simplify_toffoli_pairs(const Circuit& circuit) {
  const auto partner = toffoli_partners(circuit, [](const Gate&) { return true; });
  Circuit out(circuit.n_qubits());
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    const Gate& g = circuit[i];
    if (partner[i] >= 0)
      append_toffoli_w(out, g.controls[0], g.controls[1], g.targets[0],
                       static_cast<std::size_t>(partner[i]) < i);
    else
      out.add(g);
  }
  return out;
}

Circuit lower_pauli_x_exp(const Gate& gate, const CouplingMap& coupling,
                          const std::vector<int>& layout) {
  if (gate.kind != GateKind::PauliXExp || !gate.controls.empty())
    throw ValidationError("lower_pauli_x_exp expects an uncontrolled PauliXExp");
  Circuit c(static_cast<int>(layout.size()));
  c.add(gate);
  return lower(c, coupling, layout);
}

std::vector<Violation> validate_connectivity(const Circuit& circuit, const CouplingMap& coupling) {
  std::vector<Violation> v;
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    const Gate& g = circuit[i];
    if (!g.is_native())
      throw ValidationError("gate " + std::to_string(i) + " (" + g.name() + ") is not native");
    if (!g.is_cnot()) continue;
    const int a = g.controls[0], b = g.targets[0];
    if (a >= coupling.n_qubits() || b >= coupling.n_qubits() || !coupling.has_edge(a, b))
      v.push_back({i, a, b});
  }
  return v;
}

}  // namespace mp2q
