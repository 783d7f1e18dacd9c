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
#include <vector>

#include <Eigen/Dense>

#include "mp2q/circuit.hpp"
#include "mp2q/hfdata.hpp"

namespace mp2q {

// sqrt: readout |1> probability C_e/|D|; value: readout |1> amplitude C_e/|D|.
enum class UeVariant { Sqrt, Value };

struct AngleTable {
  int n_control_qubits = 0;
  std::vector<double> angles;   // alpha, indexed by control bitmask
  std::vector<double> targets;  // full rotation angle per input code
  double c_e = 0.0;             // Hartree
  UeVariant variant = UeVariant::Sqrt;
  Polarity polarity = Polarity::Zero;
};

// min |D| over non-padding entries.
double default_c_e(const EriBlock& blk);

// arccos(1 - 2 C_e/|D|) (sqrt) or 2 arcsin(C_e/|D|) (value); 0 on padding.
std::vector<double> ue_targets(const EriBlock& blk, UeVariant variant, double c_e);

// Fast Moebius / zeta transforms over the subset lattice. With zero polarity
// a gate on mask m fires for input x when m and x share no bit, so the
// lattice is taken over complements.
std::vector<double> moebius_transform(const std::vector<double>& targets, Polarity p);
std::vector<double> subset_sum(const std::vector<double>& angles, Polarity p);

AngleTable solve_angles(const EriBlock& blk, UeVariant variant, double c_e,
                        Polarity p = Polarity::Zero);
AngleTable solve_angles_from_targets(std::vector<double> targets, Polarity p = Polarity::Zero);

// Register qubits (bit j of the code on reg[j]) plus the readout qubit.
struct UeLayout {
  std::vector<int> reg;
  int readout = 0;
  int n_qubits = 0;
};
UeLayout default_ue_layout(int q);

// Ry, then every CRy, then every C^2 Ry, ... in ascending mask order.
// Zero angles are kept unless `prune_zero` is set.
Circuit build_ue(const AngleTable& angles, bool prune_zero = false);
Circuit build_ue(const AngleTable& angles, const UeLayout& layout, bool prune_zero = false);
// Only the gates that fire on basis input `x`.
Circuit build_ue_lite(const AngleTable& angles, std::uint64_t x);
// One fully controlled Ry per code (X-conjugated for zero bits), full angles.
Circuit build_ue_naive(const EriBlock& blk, UeVariant variant, double c_e);

// preferred_base if set, otherwise the lowest code with gamma 0.
std::uint64_t default_base_state(const EriBlock& blk);

// X prep of |y>, then exp(i lambda gamma_x X^{x xor y}) for ascending x.
Circuit build_uint(const EriBlock& blk, double lambda, std::uint64_t y);
Circuit build_uint(const EriBlock& blk, double lambda, std::uint64_t y, const std::vector<int>& reg,
                   int n_qubits);

// Ry tree preparing sum_x gamma_x/|gamma| |x>.
Circuit build_uint_exact(const EriBlock& blk);
Circuit build_uint_exact(const std::vector<double>& gamma, const std::vector<int>& reg,
                         int n_qubits);

// AO -> MO transfer. Each slot owns an AO register and an MO register; code
// 0 means "no orbital", AO index k is code k+1 and MO column mo_columns[a]
// is code a+1.
struct UtransPlan {
  int n_slots = 4;
  int n_ao = 0;
  std::vector<int> mo_columns;
};
struct UtransLayout {
  std::vector<std::vector<int>> ao;  // per slot
  std::vector<std::vector<int>> mo;
  int n_qubits = 0;
};
UtransLayout utrans_layout(const UtransPlan& plan);
Circuit build_utrans(const Eigen::MatrixXd& mo_coefficients, double lambda, const UtransPlan& plan);
// Hadamards on every AO qubit. Postselecting all-zero AO afterwards sums the
// AO-indexed branches coherently into each MO outcome.
Circuit ao_interference_layer(const UtransPlan& plan);

// H(anc), u0, controlled u0^dagger, controlled u1, H(anc). u0 and u1 act on
// reg.size() qubits, mapped onto `reg`.
Circuit build_difference(const Circuit& u0, const Circuit& u1, const std::vector<int>& reg,
                         int ancilla, int n_qubits);

struct PipelineSpec {
  EriBlock block;
  double lambda = 0.0;
  std::optional<std::uint64_t> base_state;
};

// Register on qubits 0..Q-1, readout q' on qubit Q; U_INT then U_E.
Circuit build_pipeline(const PipelineSpec& spec, const AngleTable& angles);

// Register 0..Q-1, readout Q, ancilla q'' on Q+1: exact preparation, a
// controlled r/s register swap inside an H-sandwich on q'', then U_E.
// Pr[q''=1, q'=1] = sum_x |psi_x - psi_T(x)|^2 / 4 * C_e/|D_x|.
Circuit build_antisymmetrized_pipeline(const EriBlock& blk, const AngleTable& angles);

}  // namespace mp2q
