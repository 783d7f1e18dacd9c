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

#include "mp2q/mp2.hpp"

#include <cmath>

#include "mp2q/error.hpp"

namespace mp2q {

namespace {

double checked_denominator(double dv, int a, int b, int r, int s) {
  if (dv == 0.0)
    throw NumericalError("zero MP2 denominator at (a,b,r,s) = (" + std::to_string(a) + "," +
                         std::to_string(b) + "," + std::to_string(r) + "," + std::to_string(s) + ")");
  return dv;
}

double closed_shell(const HartreeFockData& d) {
  const auto& e = d.orbital_energies;
  double sum = 0;
  for (int a = 0; a < d.n_occupied; ++a)
    for (int b = 0; b < d.n_occupied; ++b)
      for (int r = d.n_occupied; r < d.n_orbitals; ++r)
        for (int s = d.n_occupied; s < d.n_orbitals; ++s) {
          const double dv = checked_denominator(
              (e[static_cast<std::size_t>(a)] + e[static_cast<std::size_t>(b)]) -
                  (e[static_cast<std::size_t>(r)] + e[static_cast<std::size_t>(s)]),
              a, b, r, s);
          sum += d.eri_mo(a, b, r, s) * (2 * d.eri_mo(r, s, a, b) - d.eri_mo(r, s, b, a)) / dv;
        }
  return sum;
}

double helium_ground(const HartreeFockData& d) {
  if (d.n_occupied != 1)
    throw ValidationError("helium-ground formula needs exactly one occupied orbital");
  const auto& e = d.orbital_energies;
  double sum = 0;
  for (int r = 1; r < d.n_orbitals; ++r)
    for (int s = 1; s < d.n_orbitals; ++s) {
      const double dv = checked_denominator(
          (e[0] + e[0]) - (e[static_cast<std::size_t>(r)] + e[static_cast<std::size_t>(s)]), 0, 0, r, s);
      sum += d.eri_mo(0, 0, r, s) * d.eri_mo(r, s, 0, 0) / dv;
    }
  return sum;
}

// Spin orbital p = 2i + sigma.
double spin_orbital(const HartreeFockData& d) {
  const int no = 2 * d.n_occupied, n = 2 * d.n_orbitals;
  const auto& e = d.orbital_energies;
  auto g = [&](int p, int q, int r, int s) {
    if (p % 2 != r % 2 || q % 2 != s % 2) return 0.0;
    return d.eri_mo(p / 2, q / 2, r / 2, s / 2);
  };
  auto eps = [&](int p) { return e[static_cast<std::size_t>(p / 2)]; };
  double sum = 0;
  for (int a = 0; a < no; ++a)
    for (int b = a + 1; b < no; ++b)
      for (int r = no; r < n; ++r)
        for (int s = r + 1; s < n; ++s) {
          const double anti = g(a, b, r, s) - g(a, b, s, r);
          if (anti == 0.0) continue;
          const double dv = checked_denominator((eps(a) + eps(b)) - (eps(r) + eps(s)), a, b, r, s);
          sum += anti * anti / dv;
        }
  return sum;
}

}  // namespace

Mp2Formula parse_formula(const std::string& s) {
  if (s == "helium-ground") return Mp2Formula::HeliumGround;
  if (s == "closed-shell") return Mp2Formula::ClosedShell;
  if (s == "spin-orbital") return Mp2Formula::SpinOrbital;
  throw ValidationError("unknown formula \"" + s + "\" (helium-ground, closed-shell, spin-orbital)");
}

std::string formula_name(Mp2Formula f) {
  switch (f) {
    case Mp2Formula::HeliumGround: return "helium-ground";
    case Mp2Formula::ClosedShell: return "closed-shell";
    case Mp2Formula::SpinOrbital: return "spin-orbital";
  }
  return "?";
}

Mp2Result mp2_energy(const HartreeFockData& d, Mp2Formula formula) {
  Mp2Result r;
  r.formula = formula;
  switch (formula) {
    case Mp2Formula::HeliumGround: r.e2_total = helium_ground(d); break;
    case Mp2Formula::ClosedShell: r.e2_total = closed_shell(d); break;
    case Mp2Formula::SpinOrbital: r.e2_total = spin_orbital(d); break;
  }
  return r;
}

Mp2Result mp2_energy(const HartreeFockData& d, Mp2Formula formula, const PartitionScheme& scheme) {
  Mp2Result r = mp2_energy(d, formula);
  for (const auto& blk : partition(d, scheme)) r.per_block[blk.label] = block_energy(blk);
  return r;
}

double block_energy(const EriBlock& blk) {
  double sum = 0;
  for (std::size_t x = 0; x < blk.size(); ++x) {
    if (blk.is_padding(x)) continue;
    const double dv = blk.denominators[x];
    if (dv == 0.0) throw NumericalError("zero denominator in block " + blk.label);
    sum += blk.gamma[x] * blk.gamma[x] / std::abs(dv);
  }
  return sum;
}

}  // namespace mp2q
