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

#include "mp2q/coupling.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <regex>

#include "mp2q/error.hpp"

namespace mp2q {

CouplingMap::CouplingMap(std::string name, int n_qubits,
                         const std::vector<std::pair<int, int>>& edges)
    : name_(std::move(name)), n_(n_qubits), adj_(static_cast<std::size_t>(n_qubits)) {
  if (n_qubits < 0) throw ValidationError("coupling map with negative size");
  for (auto [a, b] : edges) {
    if (a == b) throw ValidationError("self-loop edge on qubit " + std::to_string(a));
    if (a < 0 || b < 0 || a >= n_ || b >= n_)
      throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") outside " + std::to_string(n_) + "-qubit map");
    if (edges_.insert({std::min(a, b), std::max(a, b)}).second) {
      adj_[static_cast<std::size_t>(a)].push_back(b);
      adj_[static_cast<std::size_t>(b)].push_back(a);
    }
  }
  for (auto& v : adj_) std::sort(v.begin(), v.end());
}

CouplingMap CouplingMap::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) e.emplace_back(a, b);
  return CouplingMap("complete-" + std::to_string(n), n, e);
}

CouplingMap CouplingMap::path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a + 1 < n; ++a) e.emplace_back(a, a + 1);
  return CouplingMap("path-" + std::to_string(n), n, e);
}

CouplingMap CouplingMap::grid(int rows, int cols) {
  std::vector<std::pair<int, int>> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) e.emplace_back(v, v + 1);
      if (r + 1 < rows) e.emplace_back(v, v + cols);
    }
  return CouplingMap("grid-" + std::to_string(rows) + "x" + std::to_string(cols), rows * cols, e);
}

CouplingMap CouplingMap::from_json(const nlohmann::json& j) {
  try {
    std::vector<std::pair<int, int>> e;
    for (const auto& je : j.at("edges")) {
      if (je.size() != 2) throw ValidationError("edge entries must be pairs");
      e.emplace_back(je[0].get<int>(), je[1].get<int>());
    }
    return CouplingMap(j.value("name", std::string("custom")), j.at("n_qubits").get<int>(), e);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("coupling map JSON: ") + ex.what());
  }
}

CouplingMap CouplingMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open coupling map " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(path + ": " + ex.what());
  }
  return from_json(j);
}

CouplingMap CouplingMap::named(const std::string& name) {
  std::smatch m;
  static const std::regex complete_re("complete-(\\d+)"), path_re("path-(\\d+)"),
      grid_re("grid-(\\d+)x(\\d+)");
  if (std::regex_match(name, m, complete_re)) return complete(std::stoi(m[1]));
  if (std::regex_match(name, m, path_re)) return path(std::stoi(m[1]));
  if (std::regex_match(name, m, grid_re)) return grid(std::stoi(m[1]), std::stoi(m[2]));
  return load(data_dir() + "/coupling/" + name + ".json");
}

bool CouplingMap::has_edge(int a, int b) const {
  return edges_.count({std::min(a, b), std::max(a, b)}) > 0;
}

nlohmann::json CouplingMap::to_json() const {
  nlohmann::json e = nlohmann::json::array();
  for (auto [a, b] : edges_) e.push_back({a, b});
  return {{"name", name_}, {"n_qubits", n_}, {"edges", e}};
}

std::string data_dir() {
  if (const char* env = std::getenv("MP2Q_DATA_DIR"); env && *env) return env;
  return MP2Q_DATA_DIR;
}

namespace {

// Shape vertices in an order where each vertex after the first is adjacent
// to an earlier one when possible; starts from the highest-degree vertex.
std::vector<int> match_order(const CouplingMap& shape) {
  const int n = shape.n_qubits();
  std::vector<int> order;
  std::vector<bool> placed(static_cast<std::size_t>(n), false);
  while (static_cast<int>(order.size()) < n) {
    int best = -1, best_links = -1, best_deg = -1;
    for (int v = 0; v < n; ++v) {
      if (placed[static_cast<std::size_t>(v)]) continue;
      int links = 0;
      for (int u : shape.neighbors(v)) links += placed[static_cast<std::size_t>(u)];
      if (links > best_links || (links == best_links && shape.degree(v) > best_deg)) {
        best = v;
        best_links = links;
        best_deg = shape.degree(v);
      }
    }
    placed[static_cast<std::size_t>(best)] = true;
    order.push_back(best);
  }
  return order;
}

// All monomorphisms avoiding `blocked`, in lexicographic order of the host
// vertices along `order`. Embeddings that occupy an already seen vertex set
// are skipped; the packing only cares about occupied vertices.
std::vector<std::vector<int>> all_embeddings(const CouplingMap& host, const CouplingMap& shape,
                                             const std::vector<int>& order) {
  const int n = shape.n_qubits();
  std::vector<std::vector<int>> out;
  std::set<std::vector<int>> seen_sets;
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(host.n_qubits()), false);
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == order.size()) {
      std::vector<int> key = map;
      std::sort(key.begin(), key.end());
      if (seen_sets.insert(key).second) out.push_back(map);
      return;
    }
    const int v = order[depth];
    for (int h = 0; h < host.n_qubits(); ++h) {
      if (used[static_cast<std::size_t>(h)] || host.degree(h) < shape.degree(v)) continue;
      bool ok = true;
      for (int u : shape.neighbors(v)) {
        const int hu = map[static_cast<std::size_t>(u)];
        if (hu >= 0 && !host.has_edge(h, hu)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      map[static_cast<std::size_t>(v)] = h;
      used[static_cast<std::size_t>(h)] = true;
      rec(depth + 1);
      used[static_cast<std::size_t>(h)] = false;
      map[static_cast<std::size_t>(v)] = -1;
    }
  };
  rec(0);
  return out;
}

}  // namespace

std::vector<Embedding> find_parallel_embeddings(const CouplingMap& coupling,
                                                const std::vector<CouplingMap>& shapes, int k) {
  if (k <= 0) return {};
  std::vector<Embedding> candidates;
  for (std::size_t si = 0; si < shapes.size(); ++si) {
    const auto& shape = shapes[si];
    if (shape.n_qubits() == 0 || shape.n_qubits() > coupling.n_qubits()) continue;
    for (auto& e : all_embeddings(coupling, shape, match_order(shape)))
      candidates.push_back({static_cast<int>(si), std::move(e)});
  }
  std::vector<std::uint8_t> taken(static_cast<std::size_t>(coupling.n_qubits()), 0);
  std::vector<std::size_t> chosen, best;
  std::size_t budget = 2'000'000;  // search nodes; packing is NP-hard in general
  std::function<bool(std::size_t)> rec = [&](std::size_t from) {
    if (chosen.size() > best.size()) best = chosen;
    if (static_cast<int>(chosen.size()) == k) return true;
    for (std::size_t i = from; i < candidates.size(); ++i) {
      if (budget == 0) return false;
      --budget;
      const auto& e = candidates[i].map;
      if (std::any_of(e.begin(), e.end(), [&](int h) { return taken[static_cast<std::size_t>(h)]; }))
        continue;
      for (int h : e) taken[static_cast<std::size_t>(h)] = 1;
      chosen.push_back(i);
      if (rec(i + 1)) return true;
      chosen.pop_back();
      for (int h : e) taken[static_cast<std::size_t>(h)] = 0;
    }
    return false;
  };
  rec(0);
  std::vector<Embedding> out;
  for (std::size_t i : best) out.push_back(candidates[i]);
  return out;
}

std::vector<std::vector<int>> find_parallel_embeddings(const CouplingMap& coupling,
                                                       const CouplingMap& shape, int k) {
  std::vector<std::vector<int>> out;
  for (auto& e : find_parallel_embeddings(coupling, std::vector<CouplingMap>{shape}, k))
    out.push_back(std::move(e.map));
  return out;
}

}  // namespace mp2q
