// Copyright 2026 The falqon-factor Authors
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
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "falqon/core.hpp"
#include "falqon/zpoly.hpp"

namespace falqon {

/// One Hermitian Pauli string with a real weight. Masks are disjoint.
struct PauliTerm {
  Mask x = 0;
  Mask y = 0;
  Mask z = 0;
  double coeff = 0.0;

  Mask flips() const { return x | y; }
  friend bool operator==(const PauliTerm&, const PauliTerm&) = default;
};

/// Real linear combination of Pauli strings, kept in canonical (x, y, z) order.
class PauliSum {
 public:
  using Key = std::tuple<Mask, Mask, Mask>;

  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}

  int n_qubits() const { return n_qubits_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  PauliSum& add(Mask x, Mask y, Mask z, double coeff) {
    if ((x & y) || (x & z) || (y & z)) throw InvalidInput("Pauli masks overlap");
    if (((x | y | z) >> n_qubits_) != 0) throw InvalidInput("Pauli mask exceeds qubit count");
    double& slot = terms_[{x, y, z}];
    slot += coeff;
    if (slot == 0.0) terms_.erase({x, y, z});
    return *this;
  }

  std::vector<PauliTerm> terms() const {
    std::vector<PauliTerm> out;
    out.reserve(terms_.size());
    for (const auto& [k, c] : terms_) out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), c});
    return out;
  }

  double coefficient(Mask x, Mask y, Mask z) const {
    auto it = terms_.find({x, y, z});
    return it == terms_.end() ? 0.0 : it->second;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (const auto& t : terms()) {
      os << (first ? (t.coeff < 0 ? "-" : "") : (t.coeff < 0 ? " - " : " + ")) << std::abs(t.coeff);
      for (int q = 0; q < n_qubits_; ++q) {
        const Mask b = qubit_mask(n_qubits_, q);
        if (t.x & b) os << " x" << q + 1;
        if (t.y & b) os << " y" << q + 1;
        if (t.z & b) os << " z" << q + 1;
      }
      first = false;
    }
    return os.str();
  }

  friend bool operator==(const PauliSum&, const PauliSum&) = default;

 private:
  int n_qubits_ = 0;
  std::map<Key, double> terms_;
};

/// Uniform drive weights (1/2 per qubit).
inline std::vector<double> default_drive_weights(int n_qubits) {
  return std::vector<double>(static_cast<std::size_t>(n_qubits), 0.5);
}

/// C = i [H_p, H_d] for diagonal H_p and H_d = sum_i w_i x_i.
///
/// z_i x_i - x_i z_i = 2i y_i, so every monomial a_S z_S contributes
/// -2 w_i a_S y_i z_{S\i} for each i in S.
inline PauliSum commutator_with_drive(const ZPolynomial& h, std::span<const double> drive_weights) {
  const int n = h.n_qubits();
  if (static_cast<int>(drive_weights.size()) != n) throw InvalidInput("drive weight count differs from qubit count");
  PauliSum c(n);
  for (const auto& [mask, a] : h.terms()) {
    for (int q = 0; q < n; ++q) {
      const Mask b = qubit_mask(n, q);
      const double w = drive_weights[static_cast<std::size_t>(q)];
      if (!(mask & b) || w == 0.0) continue;
      c.add(0, b, mask & ~b, -2.0 * w * a);
    }
  }
  return c;
}

/// Diagonal-tomography group: the part of C whose Y sits on `qubit` equals
/// R D R^dagger with R = exp(-i pi/4 x_qubit) and D diagonal.
struct TomographyGroup {
  int qubit = 0;
  ZPolynomial diagonal;
};

/// Splits a single-Y PauliSum into per-qubit diagonal groups.
///
/// R z_k R^dagger = -y_k for the 90-degree x rotation, so a term
/// c * y_k z_rest maps to -c * z_k z_rest in group k.
inline std::vector<TomographyGroup> tomography_groups(const PauliSum& c) {
  const int n = c.n_qubits();
  std::map<int, ZPolynomial> groups;
  for (const auto& t : c.terms()) {
    if (t.x != 0 || std::popcount(t.y) != 1) throw InvalidInput("tomography needs exactly one Y and no X per term");
    const int bit = std::countr_zero(t.y);
    const int qubit = n - 1 - bit;
    auto [it, inserted] = groups.try_emplace(qubit, ZPolynomial(n));
    it->second.add(t.z | t.y, -t.coeff);
  }
  std::vector<TomographyGroup> out;
  for (auto& [q, d] : groups) out.push_back({q, std::move(d)});
  return out;
}

// ---------------------------------------------------------------------------
// Dense rendering, used only by verification oracles.

using DenseMatrix = Eigen::MatrixXcd;

inline void check_dense_size(int n) {
  if (n > kDenseGuard) throw SizeGuard("dense rendering limited to 12 qubits");
}

inline DenseMatrix dense(const ZPolynomial& h) {
  check_dense_size(h.n_qubits());
  const auto diag = zpoly_diagonal(h);
  DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(diag.size()), static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  return m;
}

/// P|m> = i^{|y|} (-1)^{popcount(m & (y|z))} |m xor (x|y)>.
inline Complex pauli_phase(const PauliTerm& t, Index m) {
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex base = kIPow[std::popcount(t.y) & 3];
  return parity(m & (t.y | t.z)) ? -base : base;
}

inline DenseMatrix dense(const PauliSum& c) {
  check_dense_size(c.n_qubits());
  const Index dim = dimension(c.n_qubits());
  DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& t : c.terms()) {
    for (Index col = 0; col < dim; ++col) {
      m(static_cast<Eigen::Index>(col ^ t.flips()), static_cast<Eigen::Index>(col)) += t.coeff * pauli_phase(t, col);
    }
  }
  return m;
}

/// Single-qubit operator embedded on `qubit` of an n-qubit register.
inline DenseMatrix embed(const Eigen::Matrix2cd& op, int n_qubits, int qubit) {
  check_dense_size(n_qubits);
  const Index dim = dimension(n_qubits);
  const Mask b = qubit_mask(n_qubits, qubit);
  DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Index col = 0; col < dim; ++col) {
    const int cb = (col & b) ? 1 : 0;
    for (int rb = 0; rb < 2; ++rb) {
      const Index row = rb ? (col | b) : (col & ~b);
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = op(rb, cb);
    }
  }
  return m;
}

inline Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

inline Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

/// exp(-i angle/2 * sigma_x).
inline Eigen::Matrix2cd rotation_x(double angle) {
  Eigen::Matrix2cd m;
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  m << c, Complex(0, -s), Complex(0, -s), c;
  return m;
}

/// exp(-i angle/2 * sigma_y).
inline Eigen::Matrix2cd rotation_y(double angle) {
  Eigen::Matrix2cd m;
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  m << c, -s, s, c;
  return m;
}

inline DenseMatrix dense_drive(std::span<const double> weights) {
  const int n = static_cast<int>(weights.size());
  check_dense_size(n);
  DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(dimension(n)), static_cast<Eigen::Index>(dimension(n)));
  for (int q = 0; q < n; ++q) m += weights[static_cast<std::size_t>(q)] * embed(pauli_x(), n, q);
  return m;
}

/// Sum_k R_k D_k R_k^dagger.
inline DenseMatrix reconstruct(const std::vector<TomographyGroup>& groups, int n_qubits) {
  check_dense_size(n_qubits);
  const auto dim = static_cast<Eigen::Index>(dimension(n_qubits));
  DenseMatrix out = DenseMatrix::Zero(dim, dim);
  for (const auto& g : groups) {
    const DenseMatrix r = embed(rotation_x(kPi / 2), n_qubits, g.qubit);
    out += r * dense(g.diagonal) * r.adjoint();
  }
  return out;
}

}  // namespace falqon
