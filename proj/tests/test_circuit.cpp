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

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "mp2q/circuit.hpp"
#include "mp2q/coupling.hpp"
#include "mp2q/error.hpp"
#include "mp2q/unitary.hpp"
#include "oracle.hpp"

using namespace mp2q;

namespace {

// Checks every shape edge lands on a host edge and the map is injective.
bool is_monomorphism(const CouplingMap& host, const CouplingMap& shape, const std::vector<int>& m) {
  if (static_cast<int>(m.size()) != shape.n_qubits()) return false;
  if (std::set<int>(m.begin(), m.end()).size() != m.size()) return false;
  for (auto [a, b] : shape.edges())
    if (!host.has_edge(m[static_cast<std::size_t>(a)], m[static_cast<std::size_t>(b)])) return false;
  return true;
}

// Brute force: every vertex set hosting `shape`, found by plain backtracking.
std::vector<std::set<int>> all_vertex_sets(const CouplingMap& host, const CouplingMap& shape) {
  std::set<std::set<int>> found;
  std::vector<int> m(static_cast<std::size_t>(shape.n_qubits()), -1);
  std::vector<bool> used(static_cast<std::size_t>(host.n_qubits()), false);
  std::function<void(int)> rec = [&](int v) {
    if (v == shape.n_qubits()) {
      found.insert(std::set<int>(m.begin(), m.end()));
      return;
    }
    for (int h = 0; h < host.n_qubits(); ++h) {
      if (used[static_cast<std::size_t>(h)]) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u)
        if (shape.has_edge(u, v) && !host.has_edge(m[static_cast<std::size_t>(u)], h)) ok = false;
      if (!ok) continue;
      m[static_cast<std::size_t>(v)] = h;
      used[static_cast<std::size_t>(h)] = true;
      rec(v + 1);
      used[static_cast<std::size_t>(h)] = false;
    }
  };
  rec(0);
  return {found.begin(), found.end()};
}

int max_disjoint(const std::vector<std::set<int>>& sets) {
  int best = 0;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    best = std::max(best, static_cast<int>(chosen.size()));
    for (std::size_t i = from; i < sets.size(); ++i) {
      bool ok = true;
      for (std::size_t c : chosen)
        for (int v : sets[i]) ok = ok && !sets[c].count(v);
      if (!ok) continue;
      chosen.push_back(i);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  return best;
}

}  // namespace

TEST(Circuit, OperandValidation) {
  Circuit c(3);
  EXPECT_THROW(c.add(Gate::cnot(0, 3)), ValidationError);
  EXPECT_THROW(c.add(Gate::toffoli(0, 0, 1)), ValidationError);
  EXPECT_THROW(c.add(Gate::mcry({0, 1}, 1, 0.3)), ValidationError);
  EXPECT_THROW(c.add(Gate::rz(-1, 0.1)), ValidationError);
  EXPECT_NO_THROW(c.add(Gate::mcry({0, 1}, 2, 0.3, Polarity::Zero)));
  EXPECT_EQ(c.size(), 1u);
}

TEST(Circuit, InverseUndoes) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> a(-2, 2);
  Circuit c(3);
  c.add(Gate::h(0)).add(Gate::cry(0, 1, a(rng))).add(Gate::pauli_x_exp({0, 2}, a(rng)));
  c.add(Gate::mcry({0, 1}, 2, a(rng), Polarity::Zero)).add(Gate::swap(1, 2)).add(Gate::rx(2, a(rng)));
  Circuit both = c;
  both.append(c.inverse());
  EXPECT_NEAR(oracle::max_abs(unitary_of(both) - oracle::Mat::Identity(8, 8)), 0.0, 1e-12);
}

TEST(Circuit, ControlledMatchesProjectorForm) {
  Circuit c(2);
  c.add(Gate::ry(0, 0.4)).add(Gate::cry(0, 1, 0.9, Polarity::Zero)).add(Gate::h(1));
  Circuit wide(3);
  wide.append(c.remapped({0, 1}, 3));
  const auto cu = c.remapped({0, 1}, 3).controlled(2);
  const auto expect = oracle::controlled(3, {2}, 1, oracle::circuit_matrix(wide));
  EXPECT_NEAR(oracle::phase_distance(expect, unitary_of(cu)), 0.0, 1e-12);
  // Relative phase matters for a controlled gate, so compare exactly too.
  EXPECT_NEAR(oracle::max_abs(expect - unitary_of(cu)), 0.0, 1e-12);
}

TEST(Circuit, RemappedRelabels) {
  Circuit c(2);
  c.add(Gate::cnot(0, 1));
  const auto r = c.remapped({3, 1}, 4);
  EXPECT_EQ(r.n_qubits(), 4);
  EXPECT_EQ(r[0].controls, std::vector<int>{3});
  EXPECT_EQ(r[0].targets, std::vector<int>{1});
  EXPECT_THROW(c.remapped({1, 1}, 4), ValidationError);
}

TEST(Circuit, JsonRoundTrip) {
  Circuit c(4);
  c.add(Gate::x(0)).add(Gate::h(1)).add(Gate::rx(2, 0.1)).add(Gate::ry(3, -0.2)).add(Gate::rz(0, 0.3));
  c.add(Gate::cnot(0, 1)).add(Gate::toffoli(0, 1, 2)).add(Gate::swap(2, 3));
  c.add(Gate::cry(1, 3, 0.7, Polarity::Zero)).add(Gate::mcry({0, 1, 2}, 3, 1.1));
  c.add(Gate::pauli_x_exp({0, 2, 3}, 0.05));
  Gate crz = Gate::rz(2, 0.25);
  crz.controls = {0, 3};
  crz.polarity = Polarity::Zero;
  c.add(crz);
  const auto back = circuit_from_json(to_json(c));
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_TRUE(back[i] == c[i]) << i;
  EXPECT_NEAR(oracle::max_abs(unitary_of(back) - oracle::circuit_matrix(c)), 0.0, 1e-12);
}

TEST(Circuit, JsonErrors) {
  EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"gates": []})")), ValidationError);
  EXPECT_THROW(circuit_from_json(nlohmann::json::parse(
                   R"({"n_qubits": 2, "gates": [{"kind": "CNOT", "qubits": [0]}]})")),
               ValidationError);
  EXPECT_THROW(circuit_from_json(nlohmann::json::parse(
                   R"({"n_qubits": 2, "gates": [{"kind": "Foo", "qubits": [0]}]})")),
               ValidationError);
}

TEST(Coupling, GeneratedMaps) {
  const auto k = CouplingMap::named("complete-4");
  EXPECT_EQ(k.edges().size(), 6u);
  const auto p = CouplingMap::named("path-5");
  EXPECT_EQ(p.edges().size(), 4u);
  EXPECT_TRUE(p.has_edge(3, 2));
  EXPECT_FALSE(p.has_edge(0, 2));
  const auto g = CouplingMap::named("grid-2x3");
  EXPECT_EQ(g.n_qubits(), 6);
  EXPECT_EQ(g.edges().size(), 7u);
  EXPECT_THROW(CouplingMap("bad", 2, {{0, 0}}), ValidationError);
  EXPECT_THROW(CouplingMap("bad", 2, {{0, 2}}), ValidationError);
}

TEST(Coupling, ShippedMaps) {
  const auto h = CouplingMap::named("h-shape-7");
  EXPECT_EQ(h.n_qubits(), 7);
  EXPECT_EQ(h.edges().size(), 6u);
  EXPECT_EQ(h.degree(5), 3);
  EXPECT_EQ(h.degree(6), 3);
  const auto f = CouplingMap::named("ibm-27-heavy-hex");
  EXPECT_EQ(f.n_qubits(), 27);
  EXPECT_EQ(f.edges().size(), 28u);
  int deg3 = 0;
  for (int v = 0; v < 27; ++v) {
    EXPECT_GE(f.degree(v), 1);
    EXPECT_LE(f.degree(v), 3);
    if (f.degree(v) == 3) ++deg3;
  }
  EXPECT_EQ(deg3, 8);
  // Heavy-hex: degree-3 vertices are never adjacent.
  for (auto [a, b] : f.edges()) EXPECT_FALSE(f.degree(a) == 3 && f.degree(b) == 3);
  EXPECT_THROW(CouplingMap::named("no-such-map"), ValidationError);
}

TEST(Embeddings, SingleEdgeOnPath) {
  CouplingMap edge("edge", 2, {{0, 1}});
  const auto host = CouplingMap::path(4);
  const auto e = find_parallel_embeddings(host, edge, 2);
  ASSERT_EQ(e.size(), 2u);
  for (const auto& m : e) EXPECT_TRUE(is_monomorphism(host, edge, m));
  EXPECT_EQ(std::set<int>({e[0][0], e[0][1], e[1][0], e[1][1]}).size(), 4u);
}

TEST(Embeddings, TooFewVertices) {
  EXPECT_TRUE(find_parallel_embeddings(CouplingMap::complete(6), CouplingMap::named("h-shape-7"), 1).empty());
}

TEST(Embeddings, HShapeOnHeavyHexMatchesBruteForce) {
  const auto host = CouplingMap::named("ibm-27-heavy-hex");
  const auto h7 = CouplingMap::named("h-shape-7");
  const int best = max_disjoint(all_vertex_sets(host, h7));
  const auto e = find_parallel_embeddings(host, h7, 3);
  EXPECT_EQ(static_cast<int>(e.size()), std::min(best, 3));
  for (const auto& m : e) EXPECT_TRUE(is_monomorphism(host, h7, m));
  // The 7-qubit shape alone fits at most twice on this lattice.
  EXPECT_EQ(best, 2);
}

TEST(Embeddings, ThreeWithRelayAlternative) {
  const auto host = CouplingMap::named("ibm-27-heavy-hex");
  const std::vector<CouplingMap> shapes{CouplingMap::named("h-shape-7"), CouplingMap::named("h-shape-9")};
  const auto e = find_parallel_embeddings(host, shapes, 3);
  ASSERT_EQ(e.size(), 3u);
  std::set<int> all;
  std::size_t total = 0;
  for (const auto& emb : e) {
    EXPECT_TRUE(is_monomorphism(host, shapes[static_cast<std::size_t>(emb.shape)], emb.map));
    all.insert(emb.map.begin(), emb.map.end());
    total += emb.map.size();
  }
  EXPECT_EQ(all.size(), total);
  EXPECT_EQ(e[0].shape, 0);
  EXPECT_EQ(e[1].shape, 0);
  EXPECT_EQ(e[2].shape, 1);
  // Deterministic.
  const auto again = find_parallel_embeddings(host, shapes, 3);
  for (std::size_t i = 0; i < e.size(); ++i) EXPECT_EQ(e[i].map, again[i].map);
}
