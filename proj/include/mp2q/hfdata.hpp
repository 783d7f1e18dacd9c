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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace mp2q {

// Dense real 4-index tensor, n^4 entries, last index fastest.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int n() const { return n_; }
  double& operator()(int a, int b, int r, int s) { return data_[index(a, b, r, s)]; }
  double operator()(int a, int b, int r, int s) const { return data_[index(a, b, r, s)]; }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }
  double max_abs_diff(const Tensor4& other) const;

 private:
  std::size_t index(int a, int b, int r, int s) const {
    return ((static_cast<std::size_t>(a) * n_ + b) * n_ + r) * n_ + s;
  }
  int n_ = 0;
  std::vector<double> data_;
};

// Physicists' notation throughout: eri_mo(a,b,r,s) = <ab|rs>, Hartree.
struct HartreeFockData {
  int n_orbitals = 0;
  int n_occupied = 0;
  std::vector<double> orbital_energies;
  Eigen::MatrixXd mo_coefficients;  // AO row, MO column
  Tensor4 eri_mo;
  std::optional<Tensor4> eri_ao;
  std::string description;
};

void validate(const HartreeFockData& d);
HartreeFockData hf_from_json(const nlohmann::json& j);
HartreeFockData load_hf(const std::string& path);
nlohmann::json hf_to_json(const HartreeFockData& d, bool sparse = false);

// <ab|rs> = sum_klmn c_ka c_lb c_mr c_ns <kl|mn>, one index at a time.
Tensor4 ao_to_mo(const Tensor4& eri_ao, const Eigen::MatrixXd& c);

// <ab||rs> = <ab|rs> - <ab|sr>
double antisymmetrized(const HartreeFockData& d, int a, int b, int r, int s);

// Fixed occupied pair plus a split of virtual orbitals into groups; every
// (row group, column group) combination listed in `parts` becomes a block.
struct PartitionScheme {
  int a = 0;
  int b = 0;
  std::vector<std::vector<int>> groups;
  struct Part {
    std::string label;
    int row_group;
    int col_group;
  };
  std::vector<Part> parts;
};

// 1s pair, groups {2s,2p} and {3s,3p}: Parts I=(A,A), II=(A,B), III=(B,A),
// IV=(B,B).
PartitionScheme helium_scheme();
// Virtuals of `d` in index order, chunks of `group_size`, all group pairs,
// labels "r<i>s<j>".
PartitionScheme chunked_scheme(const HartreeFockData& d, int a, int b, int group_size);

// Entries at or below this magnitude count as symmetry zeros when choosing
// base states; integral files carry them as round-off around 1e-17.
inline constexpr double kZeroGammaTolerance = 1e-12;
inline bool is_zero_gamma(double g) { return g >= -kZeroGammaTolerance && g <= kZeroGammaTolerance; }

struct EriBlock {
  std::string label;
  int a = 0;
  int b = 0;
  std::vector<int> r_orbitals;  // length 2^r_qubits, -1 marks padding
  std::vector<int> s_orbitals;
  int r_qubits = 0;
  int s_qubits = 0;
  std::vector<double> gamma;         // indexed by code r_local | s_local << r_qubits
  std::vector<double> denominators;  // eps_a + eps_b - eps_r - eps_s; -inf on padding
  // Base state to prefer over the default rule, set for mirrored blocks so
  // that both halves of a mirror pair run identical circuits.
  std::optional<std::uint64_t> preferred_base;

  int n_qubits() const { return r_qubits + s_qubits; }
  std::size_t size() const { return gamma.size(); }
  std::uint64_t code(int r_local, int s_local) const;
  bool is_padding(std::uint64_t x) const;
  int r_of(std::uint64_t x) const;
  int s_of(std::uint64_t x) const;
};

std::vector<EriBlock> partition(const HartreeFockData& d, const PartitionScheme& scheme);

// Swaps the roles of r and s: the result at code T(x) holds the entry at x.
EriBlock transposed(const EriBlock& blk, const std::string& label);
// The bit-field swap T used by transposed(); needs r_qubits == s_qubits.
std::uint64_t transpose_code(const EriBlock& blk, std::uint64_t x);

// Synthetic block on q_r + q_s qubits, no orbital bookkeeping.
EriBlock make_block(std::string label, int r_qubits, int s_qubits, std::vector<double> gamma,
                    std::vector<double> denominators);

}  // namespace mp2q
