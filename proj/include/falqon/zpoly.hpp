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

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "falqon/core.hpp"

namespace falqon {

/// Diagonal operator written as a sum of Pauli-Z monomials.
///
/// Each term maps a qubit subset (Mask, same layout as a basis index) to a
/// real coefficient; the empty mask is the identity term. The map is ordered,
/// so iteration and serialization never depend on insertion history.
class ZPolynomial {
 public:
  using Terms = std::map<Mask, double>;

  ZPolynomial() = default;
  explicit ZPolynomial(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 0 || n_qubits > 63) throw InvalidInput("qubit count out of range");
  }

  int n_qubits() const { return n_qubits_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Adds `coeff` to the term on `mask`; zero results are dropped.
  ZPolynomial& add(Mask mask, double coeff) {
    if (!std::isfinite(coeff)) throw InvalidInput("non-finite coefficient");
    if (n_qubits_ < 64 && (mask >> n_qubits_) != 0) {
      throw InvalidInput("term mask exceeds qubit count");
    }
    double& slot = terms_[mask];
    slot += coeff;
    if (slot == 0.0) terms_.erase(mask);
    return *this;
  }

  /// Adds coeff * z_{q1} z_{q2} ... using 1-based qubit labels.
  ZPolynomial& add_labels(std::initializer_list<int> labels, double coeff) {
    return add(mask_from_labels(std::vector<int>(labels)), coeff);
  }

  Mask mask_from_labels(const std::vector<int>& labels) const {
    Mask m = 0;
    for (int label : labels) {
      if (label < 1 || label > n_qubits_) throw InvalidInput("qubit label out of range");
      const Mask bit = qubit_mask(n_qubits_, label - 1);
      if (m & bit) throw InvalidInput("repeated qubit label in monomial");
      m |= bit;
    }
    return m;
  }

  /// 1-based qubit labels present in `mask`, ascending.
  std::vector<int> labels(Mask mask) const {
    std::vector<int> out;
    for (int q = 0; q < n_qubits_; ++q) {
      if (mask & qubit_mask(n_qubits_, q)) out.push_back(q + 1);
    }
    return out;
  }

  double coefficient(Mask mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? 0.0 : it->second;
  }

  double identity_coefficient() const { return coefficient(0); }

  /// Diagonal entry at one basis index; bit value 0 means z = +1.
  double value_at(Index index) const {
    double v = 0.0;
    for (const auto& [mask, coeff] : terms_) v += parity(mask & index) ? -coeff : coeff;
    return v;
  }

  /// Largest monomial degree present.
  int max_degree() const {
    int d = 0;
    for (const auto& [mask, coeff] : terms_) d = std::max(d, std::popcount(mask));
    return d;
  }

  ZPolynomial scaled(double s) const {
    ZPolynomial out(n_qubits_);
    for (const auto& [mask, coeff] : terms_) out.add(mask, coeff * s);
    return out;
  }

  /// Human-readable listing, e.g. "0.25 z1 z2 - 0.25 z2 z3".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (const auto& [mask, coeff] : terms_) {
      double c = coeff;
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      c = std::abs(c);
      os << c;
      for (int label : labels(mask)) os << " z" << label;
      first = false;
    }
    return os.str();
  }

  friend bool operator==(const ZPolynomial&, const ZPolynomial&) = default;

 private:
  int n_qubits_ = 0;
  Terms terms_;
};

/// All 2^n diagonal entries, entry m = sum_S a_S * prod_{k in S} (-1)^{bit_k(m)}.
inline std::vector<double> zpoly_diagonal(const ZPolynomial& h) {
  const int n = h.n_qubits();
  if (n > kDiagonalGuard) throw SizeGuard("diagonal materialization limited to 28 qubits");
  const Index dim = dimension(n);
  std::vector<double> diag(dim, 0.0);
  for (const auto& [mask, coeff] : h.terms()) {
    for (Index m = 0; m < dim; ++m) diag[m] += parity(mask & m) ? -coeff : coeff;
  }
  return diag;
}

}  // namespace falqon
