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

#include <cmath>
#include <random>
#include <set>

#include "mp2q/error.hpp"
#include "mp2q/hfdata.hpp"

using namespace mp2q;

namespace {

std::string data_path(const std::string& rel) { return std::string(MP2Q_DATA_DIR) + "/" + rel; }

// Naive eight-fold loop over AO indices.
Tensor4 naive_transform(const Tensor4& ao, const Eigen::MatrixXd& c) {
  const int n = ao.n();
  Tensor4 out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          double v = 0;
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              for (int m = 0; m < n; ++m)
                for (int q = 0; q < n; ++q) v += c(k, a) * c(l, b) * c(m, r) * c(q, s) * ao(k, l, m, q);
          out(a, b, r, s) = v;
        }
  return out;
}

// Random tensor with the real 8-fold physicists' symmetry.
Tensor4 random_symmetric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Tensor4 t(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          if (t(a, b, r, s) != 0.0) continue;
          const double v = u(rng);
          for (auto [p, q, x, y] : {std::array{a, b, r, s}, std::array{b, a, s, r}, std::array{r, s, a, b},
                                    std::array{s, r, b, a}, std::array{r, b, a, s}, std::array{a, s, r, b},
                                    std::array{b, r, s, a}, std::array{s, a, b, r}})
            t(p, q, x, y) = v;
        }
  return t;
}

HartreeFockData small_data(std::mt19937_64& rng) {
  HartreeFockData d;
  d.n_orbitals = 4;
  d.n_occupied = 1;
  d.orbital_energies = {-1.0, 0.3, 0.7, 1.1};
  d.mo_coefficients = Eigen::MatrixXd::Identity(4, 4);
  d.eri_mo = random_symmetric(4, rng);
  return d;
}

}  // namespace

TEST(HfData, LoadsHeliumFixture) {
  const auto d = load_hf(data_path("hf/helium_aug-cc-pvdz.json"));
  EXPECT_EQ(d.n_orbitals, 9);
  EXPECT_EQ(d.n_occupied, 1);
  ASSERT_EQ(d.orbital_energies.size(), 9u);
  EXPECT_LT(d.orbital_energies[0], 0.0);
  for (int i = 1; i < 9; ++i) EXPECT_GT(d.orbital_energies[static_cast<std::size_t>(i)], 0.0);
  // p shells are threefold degenerate.
  EXPECT_NEAR(d.orbital_energies[2], d.orbital_energies[4], 1e-10);
  EXPECT_NEAR(d.orbital_energies[6], d.orbital_energies[8], 1e-10);
  ASSERT_TRUE(d.eri_ao.has_value());
}

TEST(HfData, FixtureMoMatchesNaiveTransformOfAo) {
  const auto d = load_hf(data_path("hf/helium_aug-cc-pvdz.json"));
  const auto naive = naive_transform(*d.eri_ao, d.mo_coefficients);
  EXPECT_LT(naive.max_abs_diff(d.eri_mo), 1e-8);
  EXPECT_LT(ao_to_mo(*d.eri_ao, d.mo_coefficients).max_abs_diff(naive), 1e-12);
}

TEST(HfData, ToyZeroEri) {
  const auto d = load_hf(data_path("hf/toy_zero_eri.json"));
  EXPECT_EQ(d.n_orbitals, 2);
  for (double v : d.eri_mo.raw()) EXPECT_EQ(v, 0.0);
}

TEST(HfData, SparseAndDenseAgree) {
  std::mt19937_64 rng(1);
  const auto d = small_data(rng);
  const auto dense = hf_from_json(hf_to_json(d, false));
  const auto sparse = hf_from_json(hf_to_json(d, true));
  EXPECT_EQ(dense.eri_mo.max_abs_diff(d.eri_mo), 0.0);
  EXPECT_EQ(sparse.eri_mo.max_abs_diff(d.eri_mo), 0.0);
  EXPECT_EQ(sparse.orbital_energies, d.orbital_energies);
}

TEST(AoToMo, RandomMatchesNaive) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 4;
  const auto ao = random_symmetric(n, rng);
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c(i, j) = u(rng);
  EXPECT_LT(ao_to_mo(ao, c).max_abs_diff(naive_transform(ao, c)), 1e-12);
}

TEST(AoToMo, IdentityAndPermutation) {
  std::mt19937_64 rng(3);
  const int n = 4;
  const auto ao = random_symmetric(n, rng);
  EXPECT_EQ(ao_to_mo(ao, Eigen::MatrixXd::Identity(n, n)).max_abs_diff(ao), 0.0);
  const std::vector<int> perm{2, 0, 3, 1};
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) p(perm[static_cast<std::size_t>(j)], j) = 1;
  const auto mo = ao_to_mo(ao, p);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          EXPECT_EQ(mo(a, b, r, s), ao(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)],
                                       perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(s)]));
}

TEST(AoToMo, InverseRoundTrip) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 3;
  const auto ao = random_symmetric(n, rng);
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c(i, j) += 0.3 * u(rng);
  const auto back = ao_to_mo(ao_to_mo(ao, c), c.inverse());
  EXPECT_LT(back.max_abs_diff(ao), 1e-11);
  EXPECT_THROW(ao_to_mo(ao, Eigen::MatrixXd::Identity(2, 2)), ValidationError);
}

TEST(HfData, Antisymmetrized) {
  std::mt19937_64 rng(5);
  const auto d = small_data(rng);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
          EXPECT_DOUBLE_EQ(antisymmetrized(d, a, b, r, s), d.eri_mo(a, b, r, s) - d.eri_mo(a, b, s, r));
          EXPECT_DOUBLE_EQ(antisymmetrized(d, a, b, r, s), -antisymmetrized(d, a, b, s, r));
        }
  EXPECT_EQ(antisymmetrized(d, 0, 0, 1, 1), 0.0);
}

TEST(HfData, RejectsWrongUnitsNotationAndAsymmetry) {
  std::mt19937_64 rng(6);
  const auto d = small_data(rng);
  auto j = hf_to_json(d, true);
  auto bad_units = j;
  bad_units["units"] = "ev";
  EXPECT_THROW(hf_from_json(bad_units), ValidationError);
  auto chem = j;
  chem["notation"] = "chemist";
  EXPECT_THROW(hf_from_json(chem), ValidationError);
  auto bad_format = j;
  bad_format["eri_mo"]["format"] = "csr";
  EXPECT_THROW(hf_from_json(bad_format), ValidationError);
  auto asym = d;
  asym.eri_mo(0, 1, 2, 3) += 1e-3;
  EXPECT_THROW(validate(asym), ValidationError);
  EXPECT_THROW(hf_from_json(hf_to_json(asym, true)), ValidationError);
  auto occ = d;
  occ.n_occupied = 4;
  EXPECT_THROW(validate(occ), ValidationError);
  EXPECT_THROW(load_hf("/nonexistent/file.json"), ValidationError);
}

TEST(Partition, HeliumTilesAllVirtualPairs) {
  const auto d = load_hf(data_path("hf/helium_aug-cc-pvdz.json"));
  const auto blocks = partition(d, helium_scheme());
  ASSERT_EQ(blocks.size(), 4u);
  std::set<std::pair<int, int>> seen;
  for (const auto& b : blocks) {
    EXPECT_EQ(b.n_qubits(), 4);
    for (std::uint64_t x = 0; x < b.size(); ++x) {
      ASSERT_FALSE(b.is_padding(x));
      const int r = b.r_of(x), s = b.s_of(x);
      EXPECT_TRUE(seen.insert({r, s}).second);
      EXPECT_EQ(b.gamma[x], d.eri_mo(0, 0, r, s));
      EXPECT_DOUBLE_EQ(b.denominators[x], 2 * d.orbital_energies[0] - d.orbital_energies[static_cast<std::size_t>(r)] -
                                              d.orbital_energies[static_cast<std::size_t>(s)]);
      EXPECT_LT(b.denominators[x], 0.0);
    }
  }
  EXPECT_EQ(seen.size(), 64u);
  // Code layout: r in the low bits.
  EXPECT_EQ(blocks[0].code(1, 2), 1u | 2u << 2);
}

TEST(Partition, MirrorPartsAreTransposes) {
  const auto d = load_hf(data_path("hf/helium_aug-cc-pvdz.json"));
  const auto blocks = partition(d, helium_scheme());
  const auto& ii = blocks[1];
  const auto& iii = blocks[2];
  for (std::uint64_t x = 0; x < ii.size(); ++x) {
    const std::uint64_t tx = transpose_code(ii, x);
    EXPECT_EQ(ii.r_of(x), iii.s_of(tx));
    EXPECT_EQ(ii.s_of(x), iii.r_of(tx));
    EXPECT_NEAR(ii.gamma[x], iii.gamma[tx], 1e-12);
    EXPECT_EQ(ii.denominators[x], iii.denominators[tx]);
  }
  const auto t = transposed(iii, "T");
  for (std::uint64_t x = 0; x < ii.size(); ++x) {
    EXPECT_EQ(t.gamma[x], iii.gamma[transpose_code(iii, x)]);
    EXPECT_EQ(t.r_of(x), ii.r_of(x));
  }
  // II prefers the transposed base of III so both run the same circuit.
  ASSERT_TRUE(ii.preferred_base.has_value());
  EXPECT_TRUE(is_zero_gamma(ii.gamma[*ii.preferred_base]));
}

TEST(Partition, ChunkedPadsAndRejectsBadInput) {
  std::mt19937_64 rng(7);
  const auto d = small_data(rng);
  const auto s = chunked_scheme(d, 0, 0, 2);
  ASSERT_EQ(s.groups.size(), 2u);
  EXPECT_EQ(s.groups[1], std::vector<int>{3});
  const auto blocks = partition(d, s);
  EXPECT_EQ(blocks.size(), 4u);
  const auto& last = blocks.back();
  EXPECT_EQ(last.r_qubits, 0);
  EXPECT_FALSE(last.is_padding(0));
  const auto& mixed = blocks[1];
  EXPECT_EQ(mixed.r_qubits, 1);
  EXPECT_EQ(mixed.s_qubits, 0);
  EXPECT_THROW(chunked_scheme(d, 0, 0, 0), ValidationError);
  PartitionScheme bad = s;
  bad.groups[0] = {0};
  EXPECT_THROW(partition(d, bad), ValidationError);
  bad = s;
  bad.a = 2;
  EXPECT_THROW(partition(d, bad), ValidationError);
}

TEST(Partition, PaddingMarkedInfinite) {
  std::mt19937_64 rng(8);
  const auto d = small_data(rng);
  PartitionScheme s;
  s.groups = {{1, 2, 3}};
  s.parts = {{"P", 0, 0}};
  const auto b = partition(d, s).front();
  EXPECT_EQ(b.r_qubits, 2);
  EXPECT_TRUE(b.is_padding(b.code(3, 0)));
  EXPECT_TRUE(std::isinf(b.denominators[b.code(0, 3)]));
  EXPECT_EQ(b.gamma[b.code(3, 3)], 0.0);
  EXPECT_FALSE(b.is_padding(b.code(2, 2)));
}

TEST(MakeBlock, ChecksSizes) {
  EXPECT_THROW(make_block("x", 1, 1, {0, 0, 0}, {0, 0, 0, 0}), ValidationError);
  const auto b = make_block("x", 1, 1, {1, 2, 3, 4}, {-1, -2, -3, -4});
  EXPECT_EQ(b.r_of(b.code(1, 0)), 1);
  EXPECT_EQ(b.s_of(b.code(1, 0)), 0);
  EXPECT_EQ(transpose_code(b, 1), 2u);
}
