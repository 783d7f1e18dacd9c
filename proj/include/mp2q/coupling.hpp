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

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace mp2q {

class CouplingMap {
 public:
  CouplingMap() = default;
  CouplingMap(std::string name, int n_qubits, const std::vector<std::pair<int, int>>& edges);

  static CouplingMap complete(int n);
  static CouplingMap path(int n);
  static CouplingMap grid(int rows, int cols);
  static CouplingMap from_json(const nlohmann::json& j);
  static CouplingMap load(const std::string& path);
  // complete-N, path-N and grid-MxN are generated; any other name is looked
  // up as <data_dir>/coupling/<name>.json.
  static CouplingMap named(const std::string& name);

  const std::string& name() const { return name_; }
  int n_qubits() const { return n_; }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  bool has_edge(int a, int b) const;
  // Sorted ascending.
  const std::vector<int>& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

  nlohmann::json to_json() const;

 private:
  std::string name_;
  int n_ = 0;
  std::set<std::pair<int, int>> edges_;  // stored with first < second
  std::vector<std::vector<int>> adj_;
};

// Root of the shipped data files; MP2Q_DATA_DIR in the environment overrides
// the build-time default.
std::string data_dir();

// Up to k pairwise vertex-disjoint subgraph monomorphisms of `shape` into
// `coupling`. Entry [e][v] is the coupling vertex hosting shape vertex v in
// embedding e. Deterministic: candidates are explored in ascending vertex
// order and the first complete packing found is returned; if no packing of
// size k exists the largest one encountered is returned.
std::vector<std::vector<int>> find_parallel_embeddings(const CouplingMap& coupling,
                                                       const CouplingMap& shape, int k);

struct Embedding {
  int shape = 0;         // index into the shape list
  std::vector<int> map;  // coupling vertex per shape vertex
};

// As above, but each embedding may use any of `shapes`. Candidates of
// earlier shapes are tried first.
std::vector<Embedding> find_parallel_embeddings(const CouplingMap& coupling,
                                                const std::vector<CouplingMap>& shapes, int k);

}  // namespace mp2q
