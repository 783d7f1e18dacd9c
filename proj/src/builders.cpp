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

#include "mp2q/builders.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "mp2q/error.hpp"

namespace mp2q {

namespace {

int log2_exact(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) throw ValidationError("table length must be a power of two");
  return std::countr_zero(n);
}

std::vector<int> iota(int n, int from = 0) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), from);
  return v;
}

std::vector<int> qubits_of(std::uint64_t mask, const std::vector<int>& reg) {
  std::vector<int> q;
  for (std::size_t j = 0; j < reg.size(); ++j)
    if (mask >> j & 1) q.push_back(reg[j]);
  return q;
}

void add_x_on_zero_bits(Circuit& c, std::uint64_t pattern, const std::vector<int>& qs) {
  for (std::size_t j = 0; j < qs.size(); ++j)
    if (!(pattern >> j & 1)) c.add(Gate::x(qs[j]));
}

// Controlled Ry firing when qs read `pattern` (bit j of pattern on qs[j]).
void add_pattern_ry(Circuit& c, const std::vector<int>& qs, std::uint64_t pattern, int target,
                    double theta) {
  if (qs.empty()) {
    c.add(Gate::ry(target, theta));
    return;
  }
  add_x_on_zero_bits(c, pattern, qs);
  c.add(qs.size() == 1 ? Gate::cry(qs[0], target, theta) : Gate::mcry(qs, target, theta));
  add_x_on_zero_bits(c, pattern, qs);
}

std::vector<std::uint64_t> masks_by_popcount(std::size_t dim) {
  std::vector<std::uint64_t> m(dim);
  std::iota(m.begin(), m.end(), std::uint64_t{0});
  std::stable_sort(m.begin(), m.end(), [](std::uint64_t a, std::uint64_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  return m;
}

bool fires(std::uint64_t mask, std::uint64_t x, Polarity p, std::uint64_t full) {
  return p == Polarity::One ? (mask & ~x) == 0 : (mask & (x ^ full) & mask) == mask;
}

}  // namespace

double default_c_e(const EriBlock& blk) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < blk.size(); ++x)
    if (!blk.is_padding(x)) m = std::min(m, std::abs(blk.denominators[x]));
  if (!std::isfinite(m)) throw ValidationError("block " + blk.label + " has no non-padding entry");
  if (m == 0.0) throw NumericalError("zero denominator in block " + blk.label);
  return m;
}

std::vector<double> ue_targets(const EriBlock& blk, UeVariant variant, double c_e) {
  if (!(c_e > 0) || !std::isfinite(c_e)) throw ValidationError("C_e must be positive and finite");
  std::vector<double> t(blk.size(), 0.0);
  for (std::size_t x = 0; x < blk.size(); ++x) {
    if (blk.is_padding(x)) continue;
    const double dv = std::abs(blk.denominators[x]);
    if (dv == 0.0) throw NumericalError("zero denominator in block " + blk.label);
    const double ratio = c_e / dv;
    if (ratio > 1.0 + 1e-15)
      throw NumericalError("target out of range in block " + blk.label + ": C_e/|D| = " +
                           std::to_string(ratio) + " > 1");
    const double r = std::min(ratio, 1.0);
    t[x] = variant == UeVariant::Sqrt ? std::acos(1.0 - 2.0 * r) : 2.0 * std::asin(r);
  }
  return t;
}

std::vector<double> moebius_transform(const std::vector<double>& targets, Polarity p) {
  const int q = log2_exact(targets.size());
  const std::size_t full = targets.size() - 1;
  std::vector<long double> f(targets.size());
  for (std::size_t m = 0; m < f.size(); ++m)
    f[m] = targets[p == Polarity::One ? m : (m ^ full)];
  for (int j = 0; j < q; ++j)
    for (std::size_t m = 0; m < f.size(); ++m)
      if (m >> j & 1) f[m] -= f[m ^ (std::size_t{1} << j)];
  return std::vector<double>(f.begin(), f.end());
}

std::vector<double> subset_sum(const std::vector<double>& angles, Polarity p) {
  const int q = log2_exact(angles.size());
  const std::size_t full = angles.size() - 1;
  std::vector<long double> f(angles.begin(), angles.end());
  for (int j = 0; j < q; ++j)
    for (std::size_t m = 0; m < f.size(); ++m)
      if (m >> j & 1) f[m] += f[m ^ (std::size_t{1} << j)];
  std::vector<double> out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x)
    out[x] = static_cast<double>(f[p == Polarity::One ? x : (x ^ full)]);
  return out;
}

AngleTable solve_angles_from_targets(std::vector<double> targets, Polarity p) {
  AngleTable t;
  t.n_control_qubits = log2_exact(targets.size());
  t.angles = moebius_transform(targets, p);
  t.targets = std::move(targets);
  t.polarity = p;
  return t;
}

AngleTable solve_angles(const EriBlock& blk, UeVariant variant, double c_e, Polarity p) {
  AngleTable t = solve_angles_from_targets(ue_targets(blk, variant, c_e), p);
  t.c_e = c_e;
  t.variant = variant;
  return t;
}

UeLayout default_ue_layout(int q) { return {iota(q), q, q + 1}; }

Circuit build_ue(const AngleTable& angles, bool prune_zero) {
  return build_ue(angles, default_ue_layout(angles.n_control_qubits), prune_zero);
}

Circuit build_ue(const AngleTable& angles, const UeLayout& layout, bool prune_zero) {
  if (static_cast<int>(layout.reg.size()) != angles.n_control_qubits)
    throw ValidationError("U_E layout register width does not match the angle table");
  Circuit c(layout.n_qubits);
  for (std::uint64_t m : masks_by_popcount(angles.angles.size())) {
    const double a = angles.angles[m];
    if (prune_zero && a == 0.0) continue;
    const auto qs = qubits_of(m, layout.reg);
    if (qs.empty()) c.add(Gate::ry(layout.readout, a));
    else if (qs.size() == 1) c.add(Gate::cry(qs[0], layout.readout, a, angles.polarity));
    else c.add(Gate::mcry(qs, layout.readout, a, angles.polarity));
  }
  return c;
}

Circuit build_ue_lite(const AngleTable& angles, std::uint64_t x) {
  const auto layout = default_ue_layout(angles.n_control_qubits);
  const std::uint64_t full = angles.angles.size() - 1;
  if (x > full) throw ValidationError("lite input outside the register");
  Circuit c(layout.n_qubits);
  for (std::uint64_t m : masks_by_popcount(angles.angles.size())) {
    if (!fires(m, x, angles.polarity, full)) continue;
    const auto qs = qubits_of(m, layout.reg);
    const double a = angles.angles[m];
    if (qs.empty()) c.add(Gate::ry(layout.readout, a));
    else if (qs.size() == 1) c.add(Gate::cry(qs[0], layout.readout, a, angles.polarity));
    else c.add(Gate::mcry(qs, layout.readout, a, angles.polarity));
  }
  return c;
}

Circuit build_ue_naive(const EriBlock& blk, UeVariant variant, double c_e) {
  const auto targets = ue_targets(blk, variant, c_e);
  const int q = blk.n_qubits();
  const auto reg = iota(q);
  Circuit c(q + 1);
  for (std::uint64_t x = 0; x < targets.size(); ++x) {
    if (targets[x] == 0.0) continue;
    add_pattern_ry(c, reg, x, q, targets[x]);
  }
  return c;
}

std::uint64_t default_base_state(const EriBlock& blk) {
  if (blk.preferred_base) {
    if (!is_zero_gamma(blk.gamma[*blk.preferred_base]))
      throw ValidationError("preferred base state of block " + blk.label + " has nonzero gamma");
    return *blk.preferred_base;
  }
  for (std::uint64_t x = 0; x < blk.size(); ++x)
    if (is_zero_gamma(blk.gamma[x])) return x;
  throw ValidationError("block " + blk.label + " has no code with gamma = 0 to use as base state");
}

Circuit build_uint(const EriBlock& blk, double lambda, std::uint64_t y) {
  return build_uint(blk, lambda, y, iota(blk.n_qubits()), blk.n_qubits());
}

Circuit build_uint(const EriBlock& blk, double lambda, std::uint64_t y, const std::vector<int>& reg,
                   int n_qubits) {
  if (y >= blk.size()) throw ValidationError("base state outside the register");
  if (!is_zero_gamma(blk.gamma[y]))
    throw ValidationError("base state " + std::to_string(y) + " of block " + blk.label +
                          " has nonzero gamma");
  if (static_cast<int>(reg.size()) != blk.n_qubits()) throw ValidationError("register width mismatch");
  Circuit c(n_qubits);
  for (int q : qubits_of(y, reg)) c.add(Gate::x(q));
  for (std::uint64_t x = 0; x < blk.size(); ++x) {
    if (x == y || blk.gamma[x] == 0.0) continue;
    c.add(Gate::pauli_x_exp(qubits_of(x ^ y, reg), lambda * blk.gamma[x]));
  }
  return c;
}

Circuit build_uint_exact(const EriBlock& blk) {
  return build_uint_exact(blk.gamma, iota(blk.n_qubits()), blk.n_qubits());
}

Circuit build_uint_exact(const std::vector<double>& gamma, const std::vector<int>& reg,
                         int n_qubits) {
  const int q = log2_exact(gamma.size());
  if (static_cast<int>(reg.size()) != q) throw ValidationError("register width mismatch");
  if (std::all_of(gamma.begin(), gamma.end(), [](double g) { return g == 0.0; }))
    throw ValidationError("exact preparation needs at least one nonzero gamma");
  // weight[level][p]: squared norm of codes whose top `level` bits equal p.
  std::vector<std::vector<double>> weight(static_cast<std::size_t>(q + 1));
  weight[static_cast<std::size_t>(q)].resize(gamma.size());
  for (std::size_t x = 0; x < gamma.size(); ++x) weight[static_cast<std::size_t>(q)][x] = gamma[x] * gamma[x];
  for (int level = q - 1; level >= 0; --level) {
    auto& w = weight[static_cast<std::size_t>(level)];
    const auto& below = weight[static_cast<std::size_t>(level + 1)];
    w.resize(std::size_t{1} << level);
    for (std::size_t p = 0; p < w.size(); ++p) w[p] = below[2 * p] + below[2 * p + 1];
  }
  Circuit c(n_qubits);
  // Level j rotates qubit q-1-j conditioned on the j qubits above it.
  for (int j = 0; j < q; ++j) {
    const int tq = reg[static_cast<std::size_t>(q - 1 - j)];
    std::vector<int> ctrl;
    for (int k = 0; k < j; ++k) ctrl.push_back(reg[static_cast<std::size_t>(q - 1 - j + 1 + k)]);
    const auto& child = weight[static_cast<std::size_t>(j + 1)];
    for (std::size_t p = 0; p < (std::size_t{1} << j); ++p) {
      double theta;
      if (j == q - 1) {
        // Codes here are single entries; signed amplitudes carry the sign.
        const std::size_t x0 = 2 * p, x1 = 2 * p + 1;
        if (gamma[x0] == 0.0 && gamma[x1] == 0.0) continue;
        theta = 2 * std::atan2(gamma[x1], gamma[x0]);
      } else {
        const double l = child[2 * p], r = child[2 * p + 1];
        if (l == 0.0 && r == 0.0) continue;
        theta = 2 * std::atan2(std::sqrt(r), std::sqrt(l));
      }
      if (theta == 0.0) continue;
      add_pattern_ry(c, ctrl, p, tq, theta);
    }
  }
  return c;
}

UtransLayout utrans_layout(const UtransPlan& plan) {
  if (plan.n_slots < 1) throw ValidationError("U_trans plan needs at least one slot");
  if (plan.n_ao < 1 || plan.mo_columns.empty()) throw ValidationError("U_trans plan has no orbitals");
  auto bits = [](std::size_t n) {
    int b = 0;
    while ((std::size_t{1} << b) < n + 1) ++b;
    return b;
  };
  const int qa = bits(static_cast<std::size_t>(plan.n_ao));
  const int qm = bits(plan.mo_columns.size());
  UtransLayout l;
  int next = 0;
  for (int s = 0; s < plan.n_slots; ++s) {
    l.ao.push_back(iota(qa, next));
    next += qa;
  }
  for (int s = 0; s < plan.n_slots; ++s) {
    l.mo.push_back(iota(qm, next));
    next += qm;
  }
  l.n_qubits = next;
  return l;
}

Circuit build_utrans(const Eigen::MatrixXd& mo_coefficients, double lambda, const UtransPlan& plan) {
  const auto l = utrans_layout(plan);
  if (plan.n_ao > mo_coefficients.rows())
    throw ValidationError("U_trans plan has more AO indices than coefficient rows");
  for (int col : plan.mo_columns)
    if (col < 0 || col >= mo_coefficients.cols())
      throw ValidationError("U_trans plan names MO column " + std::to_string(col) + " out of range");
  Circuit c(l.n_qubits);
  for (int s = 0; s < plan.n_slots; ++s) {
    const auto& ao = l.ao[static_cast<std::size_t>(s)];
    const auto& mo = l.mo[static_cast<std::size_t>(s)];
    for (int k = 0; k < plan.n_ao; ++k) {
      const std::uint64_t code = static_cast<std::uint64_t>(k) + 1;
      add_x_on_zero_bits(c, code, ao);
      for (std::size_t a = 0; a < plan.mo_columns.size(); ++a) {
        const double beta = mo_coefficients(k, plan.mo_columns[a]);
        if (beta == 0.0) continue;
        Gate g = Gate::pauli_x_exp(qubits_of(a + 1, mo), lambda * beta);
        g.controls = ao;
        c.add(g);
      }
      add_x_on_zero_bits(c, code, ao);
    }
  }
  return c;
}

Circuit ao_interference_layer(const UtransPlan& plan) {
  const auto l = utrans_layout(plan);
  Circuit c(l.n_qubits);
  for (const auto& slot : l.ao)
    for (int q : slot) c.add(Gate::h(q));
  return c;
}

Circuit build_difference(const Circuit& u0, const Circuit& u1, const std::vector<int>& reg,
                         int ancilla, int n_qubits) {
  const int w = static_cast<int>(reg.size());
  if (u0.n_qubits() != w || u1.n_qubits() != w)
    throw ValidationError("difference circuit: u0 and u1 must both act on " + std::to_string(w) +
                          " register qubits");
  const Circuit m0 = u0.remapped(reg, n_qubits);
  const Circuit m1 = u1.remapped(reg, n_qubits);
  Circuit c(n_qubits);
  c.add(Gate::h(ancilla));
  c.append(m0);
  c.append(m0.inverse().controlled(ancilla));
  c.append(m1.controlled(ancilla));
  c.add(Gate::h(ancilla));
  return c;
}

Circuit build_pipeline(const PipelineSpec& spec, const AngleTable& angles) {
  const EriBlock& blk = spec.block;
  const int q = blk.n_qubits();
  if (angles.n_control_qubits != q) throw ValidationError("angle table width does not match block");
  if (angles.variant != UeVariant::Sqrt) throw ValidationError("pipeline needs the sqrt U_E variant");
  if (!(spec.lambda >= 0) || !std::isfinite(spec.lambda)) throw ValidationError("lambda must be >= 0");
  const std::uint64_t y = spec.base_state.value_or(default_base_state(blk));
  Circuit c(q + 1);
  c.append(build_uint(blk, spec.lambda, y, iota(q), q + 1));
  c.append(build_ue(angles));
  return c;
}

Circuit build_antisymmetrized_pipeline(const EriBlock& blk, const AngleTable& angles) {
  const int q = blk.n_qubits();
  if (blk.r_qubits != blk.s_qubits) throw ValidationError("antisymmetrized pipeline needs a square block");
  if (angles.n_control_qubits != q) throw ValidationError("angle table width does not match block");
  const int readout = q, anc = q + 1;
  Circuit c(q + 2);
  c.add(Gate::h(anc));
  c.append(build_uint_exact(blk.gamma, iota(q), q + 2));
  for (int j = 0; j < blk.r_qubits; ++j) {
    Gate g = Gate::swap(j, blk.r_qubits + j);
    g.controls = {anc};
    c.add(g);
  }
  c.add(Gate::h(anc));
  c.append(build_ue(angles, UeLayout{iota(q), readout, q + 2}));
  return c;
}

}  // namespace mp2q
