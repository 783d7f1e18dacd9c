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

#include <map>
#include <string>

#include "mp2q/hfdata.hpp"

namespace mp2q {

enum class Mp2Formula { HeliumGround, ClosedShell, SpinOrbital };

Mp2Formula parse_formula(const std::string& s);
std::string formula_name(Mp2Formula f);

struct Mp2Result {
  double e2_total = 0.0;                   // Hartree
  std::map<std::string, double> per_block; // magnitudes, Hartree
  Mp2Formula formula = Mp2Formula::ClosedShell;
};

// Direct summation. helium-ground needs n_occupied == 1 and sums
// <aa|rs><rs|aa> / (2 eps_a - eps_r - eps_s); closed-shell is the 2J - K
// spatial-orbital form; spin-orbital expands to spin orbitals and sums
// |<ab||rs>|^2 / D over a < b, r < s.
Mp2Result mp2_energy(const HartreeFockData& d, Mp2Formula formula);

// Same, with per_block filled from partition(d, scheme).
Mp2Result mp2_energy(const HartreeFockData& d, Mp2Formula formula, const PartitionScheme& scheme);

// sum_x gamma_x^2 / |D_x| over non-padding entries.
double block_energy(const EriBlock& blk);

}  // namespace mp2q
