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

#include "mp2q/hfdata.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "mp2q/error.hpp"

namespace mp2q {

namespace {

constexpr double kSymmetryTolerance = 1e-8;

int bits_for(std::size_t n) {
  int q = 0;
  while ((std::size_t{1} << q) < n) ++q;
  return q;
}

void flatten(const nlohmann::json& j, std::vector<double>& out) {
  if (j.is_array()) {
    for (const auto& e : j) flatten(e, out);
  } else {
    out.push_back(j.get<double>());
  }
}

Tensor4 tensor_from_json(const nlohmann::json& j, int n, const std::string& what) {
  const std::string format = j.at("format").get<std::string>();
  Tensor4 t(n);
  if (format == "dense") {
    std::vector<double> flat;
    flatten(j.at("data"), flat);
    if (flat.size() != t.raw().size())
      throw ValidationError(what + ": dense data has " + std::to_string(flat.size()) +
                            " entries, expected " + std::to_string(t.raw().size()));
    t.raw() = std::move(flat);
  } else if (format == "sparse") {
    for (const auto& e : j.at("data")) {
      if (!e.is_array() || e.size() != 5)
        throw ValidationError(what + ": sparse entries must be [a,b,r,s,value]");
      int idx[4];
      for (int k = 0; k < 4; ++k) {
        idx[k] = e[static_cast<std::size_t>(k)].get<int>();
        if (idx[k] < 0 || idx[k] >= n) throw ValidationError(what + ": sparse index out of range");
      }
      t(idx[0], idx[1], idx[2], idx[3]) = e[4].get<double>();
    }
  } else {
    throw ValidationError(what + ": format must be \"dense\" or \"sparse\"");
  }
  for (double v : t.raw())
    if (!std::isfinite(v)) throw ValidationError(what + ": non-finite entry");
  return t;
}

nlohmann::json tensor_to_json(const Tensor4& t, bool sparse) {
  const int n = t.n();
  if (sparse) {
    nlohmann::json data = nlohmann::json::array();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s)
            if (t(a, b, r, s) != 0.0) data.push_back({a, b, r, s, t(a, b, r, s)});
    return {{"format", "sparse"}, {"data", data}};
  }
  nlohmann::json data = nlohmann::json::array();
  for (int a = 0; a < n; ++a) {
    nlohmann::json ja = nlohmann::json::array();
    for (int b = 0; b < n; ++b) {
      nlohmann::json jb = nlohmann::json::array();
      for (int r = 0; r < n; ++r) {
        nlohmann::json jr = nlohmann::json::array();
        for (int s = 0; s < n; ++s) jr.push_back(t(a, b, r, s));
        jb.push_back(jr);
      }
      ja.push_back(jb);
    }
    data.push_back(ja);
  }
  return {{"format", "dense"}, {"data", data}};
}

// out(p, j, k, l) = sum_i c(i, p) in(i, j, k, l), followed by a cyclic
// index rotation so four calls transform every index.
Tensor4 contract_first_and_rotate(const Tensor4& in, const Eigen::MatrixXd& c) {
  const int n = in.n();
  Tensor4 out(n);
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < n; ++i) {
      const double cip = c(i, p);
      if (cip == 0.0) continue;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) out(j, k, l, p) += cip * in(i, j, k, l);
    }
  return out;
}

}  // namespace

double Tensor4::max_abs_diff(const Tensor4& other) const {
  if (other.n_ != n_) throw ValidationError("tensor size mismatch");
  double m = 0;
  for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - other.data_[i]));
  return m;
}

void validate(const HartreeFockData& d) {
  const int n = d.n_orbitals;
  if (n < 2) throw ValidationError("n_orbitals must be at least 2");
  if (d.n_occupied < 1 || d.n_occupied >= n)
    throw ValidationError("n_occupied must satisfy 1 <= n_occupied < n_orbitals");
  if (static_cast<int>(d.orbital_energies.size()) != n)
    throw ValidationError("orbital_energies has wrong length");
  for (double e : d.orbital_energies)
    if (!std::isfinite(e)) throw ValidationError("non-finite orbital energy");
  if (d.mo_coefficients.rows() != n || d.mo_coefficients.cols() != n)
    throw ValidationError("mo_coefficients must be n_orbitals x n_orbitals");
  if (!d.mo_coefficients.allFinite()) throw ValidationError("non-finite MO coefficient");
  if (d.eri_mo.n() != n) throw ValidationError("eri_mo has wrong dimension");
  if (d.eri_ao && d.eri_ao->n() != n) throw ValidationError("eri_ao has wrong dimension");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double dv = std::abs(d.eri_mo(a, b, r, s) - d.eri_mo(r, s, a, b));
          if (dv > kSymmetryTolerance)
            throw ValidationError("eri_mo violates <ab|rs> = <rs|ab> at (" + std::to_string(a) +
                                  "," + std::to_string(b) + "," + std::to_string(r) + "," +
                                  std::to_string(s) + "), difference " + std::to_string(dv));
        }
}

HartreeFockData hf_from_json(const nlohmann::json& j) {
  HartreeFockData d;
  try {
    if (j.value("units", std::string()) != "hartree")
      throw ValidationError("units must be \"hartree\"");
    if (j.value("notation", std::string()) != "physicist")
      throw ValidationError("notation must be \"physicist\" (chemists' notation is rejected)");
    d.n_orbitals = j.at("n_orbitals").get<int>();
    d.n_occupied = j.at("n_occupied").get<int>();
    d.description = j.value("description", std::string());
    d.orbital_energies = j.at("orbital_energies").get<std::vector<double>>();
    const auto c = j.at("mo_coefficients").get<std::vector<std::vector<double>>>();
    const int n = d.n_orbitals;
    if (n < 2 || n > 64) throw ValidationError("n_orbitals out of supported range 2..64");
    if (static_cast<int>(c.size()) != n) throw ValidationError("mo_coefficients row count");
    d.mo_coefficients.resize(n, n);
    for (int k = 0; k < n; ++k) {
      if (static_cast<int>(c[static_cast<std::size_t>(k)].size()) != n)
        throw ValidationError("mo_coefficients column count");
      for (int a = 0; a < n; ++a) d.mo_coefficients(k, a) = c[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)];
    }
    d.eri_mo = tensor_from_json(j.at("eri_mo"), n, "eri_mo");
    if (j.contains("eri_ao") && !j.at("eri_ao").is_null())
      d.eri_ao = tensor_from_json(j.at("eri_ao"), n, "eri_ao");
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("HF data schema: ") + ex.what());
  }
  validate(d);
  return d;
}

HartreeFockData load_hf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open HF data file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(path + ": " + ex.what());
  }
  return hf_from_json(j);
}

nlohmann::json hf_to_json(const HartreeFockData& d, bool sparse) {
  nlohmann::json c = nlohmann::json::array();
  for (int k = 0; k < d.n_orbitals; ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (int a = 0; a < d.n_orbitals; ++a) row.push_back(d.mo_coefficients(k, a));
    c.push_back(row);
  }
  nlohmann::json j = {{"n_orbitals", d.n_orbitals},
                      {"n_occupied", d.n_occupied},
                      {"units", "hartree"},
                      {"notation", "physicist"},
                      {"description", d.description},
                      {"orbital_energies", d.orbital_energies},
                      {"mo_coefficients", c},
                      {"eri_mo", tensor_to_json(d.eri_mo, sparse)}};
  if (d.eri_ao) j["eri_ao"] = tensor_to_json(*d.eri_ao, sparse);
  return j;
}

Tensor4 ao_to_mo(const Tensor4& eri_ao, const Eigen::MatrixXd& c) {
  const int n = eri_ao.n();
  if (c.rows() != n || c.cols() != n)
    throw ValidationError("coefficient matrix is " + std::to_string(c.rows()) + "x" +
                          std::to_string(c.cols()) + ", tensor dimension " + std::to_string(n));
  Tensor4 t = eri_ao;
  for (int pass = 0; pass < 4; ++pass) t = contract_first_and_rotate(t, c);
  return t;
}

double antisymmetrized(const HartreeFockData& d, int a, int b, int r, int s) {
  const int n = d.n_orbitals;
  for (int i : {a, b, r, s})
    if (i < 0 || i >= n) throw ValidationError("orbital index out of range");
  return d.eri_mo(a, b, r, s) - d.eri_mo(a, b, s, r);
}

PartitionScheme helium_scheme() {
  PartitionScheme s;
  s.a = 0;
  s.b = 0;
  s.groups = {{1, 2, 3, 4}, {5, 6, 7, 8}};
  s.parts = {{"I", 0, 0}, {"II", 0, 1}, {"III", 1, 0}, {"IV", 1, 1}};
  return s;
}

PartitionScheme chunked_scheme(const HartreeFockData& d, int a, int b, int group_size) {
  if (group_size < 1) throw ValidationError("group size must be positive");
  PartitionScheme s;
  s.a = a;
  s.b = b;
  for (int v = d.n_occupied; v < d.n_orbitals; v += group_size) {
    std::vector<int> g;
    for (int k = v; k < std::min(v + group_size, d.n_orbitals); ++k) g.push_back(k);
    s.groups.push_back(g);
  }
  const int ng = static_cast<int>(s.groups.size());
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j)
      s.parts.push_back({"r" + std::to_string(i) + "s" + std::to_string(j), i, j});
  return s;
}

std::uint64_t EriBlock::code(int r_local, int s_local) const {
  return static_cast<std::uint64_t>(r_local) | static_cast<std::uint64_t>(s_local) << r_qubits;
}

int EriBlock::r_of(std::uint64_t x) const {
  return r_orbitals[static_cast<std::size_t>(x & ((std::uint64_t{1} << r_qubits) - 1))];
}

int EriBlock::s_of(std::uint64_t x) const {
  return s_orbitals[static_cast<std::size_t>(x >> r_qubits)];
}

bool EriBlock::is_padding(std::uint64_t x) const { return std::isinf(denominators[static_cast<std::size_t>(x)]); }

std::vector<EriBlock> partition(const HartreeFockData& d, const PartitionScheme& scheme) {
  const int n = d.n_orbitals;
  for (int i : {scheme.a, scheme.b})
    if (i < 0 || i >= d.n_occupied) throw ValidationError("partition: occupied index out of range");
  for (const auto& g : scheme.groups) {
    if (g.empty()) throw ValidationError("partition: empty virtual group");
    for (int v : g)
      if (v < d.n_occupied || v >= n) throw ValidationError("partition: virtual index out of range");
  }
  const double occ = d.orbital_energies[static_cast<std::size_t>(scheme.a)] +
                     d.orbital_energies[static_cast<std::size_t>(scheme.b)];
  std::vector<EriBlock> out;
  for (const auto& p : scheme.parts) {
    if (p.row_group < 0 || p.col_group < 0 ||
        p.row_group >= static_cast<int>(scheme.groups.size()) ||
        p.col_group >= static_cast<int>(scheme.groups.size()))
      throw ValidationError("partition: part " + p.label + " names a missing group");
    const auto& rows = scheme.groups[static_cast<std::size_t>(p.row_group)];
    const auto& cols = scheme.groups[static_cast<std::size_t>(p.col_group)];
    EriBlock blk;
    blk.label = p.label;
    blk.a = scheme.a;
    blk.b = scheme.b;
    blk.r_qubits = bits_for(rows.size());
    blk.s_qubits = bits_for(cols.size());
    blk.r_orbitals.assign(std::size_t{1} << blk.r_qubits, -1);
    blk.s_orbitals.assign(std::size_t{1} << blk.s_qubits, -1);
    std::copy(rows.begin(), rows.end(), blk.r_orbitals.begin());
    std::copy(cols.begin(), cols.end(), blk.s_orbitals.begin());
    const std::size_t dim = std::size_t{1} << blk.n_qubits();
    blk.gamma.assign(dim, 0.0);
    blk.denominators.assign(dim, -std::numeric_limits<double>::infinity());
    for (std::size_t x = 0; x < dim; ++x) {
      const int r = blk.r_of(x), s = blk.s_of(x);
      if (r < 0 || s < 0) continue;
      blk.gamma[x] = d.eri_mo(scheme.a, scheme.b, r, s);
      // (eps_r + eps_s) is symmetric in r, s, keeping mirrored blocks bit-identical.
      blk.denominators[x] = occ - (d.orbital_energies[static_cast<std::size_t>(r)] +
                                   d.orbital_energies[static_cast<std::size_t>(s)]);
    }
    out.push_back(std::move(blk));
  }
  // For a mirror pair (g, h) / (h, g) the earlier-listed part borrows the
  // transposed default base state of the later one.
  for (std::size_t i = 0; i < scheme.parts.size(); ++i)
    for (std::size_t j = i + 1; j < scheme.parts.size(); ++j) {
      const auto& pi = scheme.parts[i];
      const auto& pj = scheme.parts[j];
      if (pi.row_group != pj.col_group || pi.col_group != pj.row_group ||
          pi.row_group == pi.col_group || out[i].r_qubits != out[i].s_qubits)
        continue;
      const EriBlock& later = out[j];
      for (std::uint64_t x = 0; x < later.size(); ++x)
        if (is_zero_gamma(later.gamma[x])) {
          const std::uint64_t tx = transpose_code(later, x);
          if (is_zero_gamma(out[i].gamma[tx])) out[i].preferred_base = tx;
          break;
        }
    }
  return out;
}

std::uint64_t transpose_code(const EriBlock& blk, std::uint64_t x) {
  if (blk.r_qubits != blk.s_qubits) throw ValidationError("transpose needs square blocks");
  const std::uint64_t mask = (std::uint64_t{1} << blk.r_qubits) - 1;
  return (x >> blk.r_qubits) | (x & mask) << blk.r_qubits;
}

EriBlock transposed(const EriBlock& blk, const std::string& label) {
  EriBlock t = blk;
  t.label = label;
  t.r_orbitals = blk.s_orbitals;
  t.s_orbitals = blk.r_orbitals;
  for (std::uint64_t x = 0; x < blk.size(); ++x) {
    const std::uint64_t tx = transpose_code(blk, x);
    t.gamma[tx] = blk.gamma[x];
    t.denominators[tx] = blk.denominators[x];
  }
  t.preferred_base.reset();
  for (std::uint64_t x = 0; x < blk.size(); ++x)
    if (is_zero_gamma(blk.gamma[x])) {
      t.preferred_base = transpose_code(blk, blk.preferred_base.value_or(x));
      break;
    }
  return t;
}

EriBlock make_block(std::string label, int r_qubits, int s_qubits, std::vector<double> gamma,
                    std::vector<double> denominators) {
  const std::size_t dim = std::size_t{1} << (r_qubits + s_qubits);
  if (gamma.size() != dim || denominators.size() != dim)
    throw ValidationError("make_block: vectors must have 2^(r_qubits+s_qubits) entries");
  EriBlock b;
  b.label = std::move(label);
  b.r_qubits = r_qubits;
  b.s_qubits = s_qubits;
  b.r_orbitals.resize(std::size_t{1} << r_qubits);
  b.s_orbitals.resize(std::size_t{1} << s_qubits);
  for (std::size_t i = 0; i < b.r_orbitals.size(); ++i) b.r_orbitals[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < b.s_orbitals.size(); ++i) b.s_orbitals[i] = static_cast<int>(i);
  b.gamma = std::move(gamma);
  b.denominators = std::move(denominators);
  return b;
}

}  // namespace mp2q
