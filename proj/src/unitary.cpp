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

#include "mp2q/unitary.hpp"

#include "mp2q/error.hpp"
#include "mp2q/statevec.hpp"

namespace mp2q {

Eigen::MatrixXcd unitary_of(const Circuit& c) {
  if (c.n_qubits() > kMaxUnitaryQubits)
    throw ValidationError("unitary_of supports at most " + std::to_string(kMaxUnitaryQubits) +
                          " qubits");
  const Eigen::Index d = Eigen::Index{1} << c.n_qubits();
  Eigen::MatrixXcd u(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto s = apply_circuit(StateVector::basis(c.n_qubits(), static_cast<std::uint64_t>(j)), c);
    for (Eigen::Index i = 0; i < d; ++i) u(i, j) = s[static_cast<std::size_t>(i)];
  }
  return u;
}

Eigen::MatrixXcd restricted_unitary(const Circuit& physical, const std::vector<int>& layout,
                                    double* leakage) {
  const int n = static_cast<int>(layout.size());
  if (n > kMaxUnitaryQubits) throw ValidationError("restricted_unitary: too many logical qubits");
  auto embed = [&](std::uint64_t x) {
    std::uint64_t p = 0;
    for (int j = 0; j < n; ++j)
      if (x >> j & 1) p |= std::uint64_t{1} << layout[static_cast<std::size_t>(j)];
    return p;
  };
  const std::uint64_t d = std::uint64_t{1} << n;
  std::vector<std::uint64_t> image(d);
  for (std::uint64_t x = 0; x < d; ++x) image[x] = embed(x);
  Eigen::MatrixXcd u(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  double leak = 0;
  for (std::uint64_t j = 0; j < d; ++j) {
    const auto s = apply_circuit(StateVector::basis(physical.n_qubits(), image[j]), physical);
    double inside = 0;
    for (std::uint64_t i = 0; i < d; ++i) {
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[image[i]];
      inside += std::norm(s[image[i]]);
    }
    leak = std::max(leak, 1.0 - inside);
  }
  if (leakage) *leakage = leak;
  return u;
}

double phase_aligned_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("shape mismatch");
  Eigen::Index bi = 0, bj = 0;
  a.cwiseAbs().maxCoeff(&bi, &bj);
  Complex phase(1, 0);
  if (std::abs(b(bi, bj)) > 0) {
    phase = a(bi, bj) / b(bi, bj);
    phase /= std::abs(phase);
  }
  return (a - phase * b).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace mp2q
