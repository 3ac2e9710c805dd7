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

// Integer factorization as a diagonal Ising problem.
//
// A biprime n = p q is written column by column as in schoolbook binary
// multiplication. Column m collects the partial products p_{m-k} q_k, the
// carry arriving from column m-1 and the carry leaving towards column m+1:
//
//     f_m = sum_k p_{m-k} q_k + c_{m-1} - 2 c_m - n_m
//
// and the cost E = sum_m f_m^2 vanishes exactly on the factorizations. The
// outermost bits of p and q are 1 for odd factors, so only the inner bits and
// the carries become binary variables (and later qubits).

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "falqon/core.hpp"
#include "falqon/zpoly.hpp"

namespace falqon {

/// Binary expansion, least significant bit first.
inline std::vector<int> bit_decompose(std::uint64_t n) {
  if (n == 0) throw InvalidInput("n = 0 has no binary expansion");
  std::vector<int> bits;
  for (; n != 0; n >>= 1) bits.push_back(static_cast<int>(n & 1u));
  return bits;
}

inline int bit_length(std::uint64_t n) { return n == 0 ? 0 : static_cast<int>(bit_decompose(n).size()); }

/// l_n / 2 rounded to the nearest integer, halves rounded up.
inline int default_factor_length(int l_n) { return (l_n + 1) / 2; }

// ---------------------------------------------------------------------------
// Boolean polynomials with integer coefficients over named 0/1 variables.

using Monomial = std::vector<std::string>;  // sorted, no repeats
using Assignment = std::map<std::string, bool>;

class BooleanPolynomial {
 public:
  using Terms = std::map<Monomial, std::int64_t>;

  BooleanPolynomial() = default;

  static BooleanPolynomial constant(std::int64_t c) {
    BooleanPolynomial p;
    p.add({}, c);
    return p;
  }

  static BooleanPolynomial variable(const std::string& name, std::int64_t c = 1) {
    BooleanPolynomial p;
    p.add({name}, c);
    return p;
  }

  const Terms& terms() const { return terms_; }

  BooleanPolynomial& add(Monomial mono, std::int64_t c) {
    std::sort(mono.begin(), mono.end());
    mono.erase(std::unique(mono.begin(), mono.end()), mono.end());
    auto& slot = terms_[mono];
    slot += c;
    if (slot == 0) terms_.erase(mono);
    return *this;
  }

  BooleanPolynomial& operator+=(const BooleanPolynomial& o) {
    for (const auto& [mono, c] : o.terms_) add(mono, c);
    return *this;
  }

  friend BooleanPolynomial operator+(BooleanPolynomial a, const BooleanPolynomial& b) {
    a += b;
    return a;
  }

  // Products use b^2 = b: the monomial of a product is the union of factors.
  friend BooleanPolynomial operator*(const BooleanPolynomial& a, const BooleanPolynomial& b) {
    BooleanPolynomial out;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        Monomial u;
        std::set_union(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(u));
        out.add(std::move(u), ca * cb);
      }
    }
    return out;
  }

  std::int64_t evaluate(const Assignment& x) const {
    std::int64_t total = 0;
    for (const auto& [mono, c] : terms_) {
      bool on = true;
      for (const auto& v : mono) {
        auto it = x.find(v);
        if (it == x.end()) throw InvalidInput("unassigned variable " + v);
        if (!it->second) {
          on = false;
          break;
        }
      }
      if (on) total += c;
    }
    return total;
  }

  std::set<std::string> variables() const {
    std::set<std::string> out;
    for (const auto& [mono, c] : terms_) out.insert(mono.begin(), mono.end());
    return out;
  }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
  }

  friend bool operator==(const BooleanPolynomial&, const BooleanPolynomial&) = default;

 private:
  Terms terms_;
};

// ---------------------------------------------------------------------------

struct LayoutEntry {
  std::string name;
  int qubit = 0;
};

/// Integer carry c_m = offset + sum_b 2^b bits[b]. A carry with no bits is a
/// constant equal to `offset`.
struct Carry {
  int column = 0;
  std::int64_t offset = 0;
  std::int64_t max = 0;
  std::vector<std::string> bits;
};

struct FactorInstance {
  std::uint64_t n = 0;
  std::vector<int> bits;  // n_i, least significant first
  int l_n = 0;
  int l_p = 0;
  int l_q = 0;
  std::vector<LayoutEntry> variable_layout;  // p's, q's, then carry bits
  std::vector<Carry> carries;                 // carry out of column m, m = 0..M

  int n_qubits() const { return static_cast<int>(variable_layout.size()); }
  int top_column() const { return l_p + l_q - 2; }

  std::map<std::string, int> layout() const {
    std::map<std::string, int> out;
    for (const auto& v : variable_layout) out.emplace(v.name, v.qubit);
    return out;
  }

  static std::string p_name(int j) { return "p" + std::to_string(j); }
  static std::string q_name(int j) { return "q" + std::to_string(j); }

  /// Bit j of p as a polynomial (constant 1 at both ends).
  BooleanPolynomial p_bit(int j) const {
    return (j == 0 || j == l_p - 1) ? BooleanPolynomial::constant(1) : BooleanPolynomial::variable(p_name(j));
  }
  BooleanPolynomial q_bit(int j) const {
    return (j == 0 || j == l_q - 1) ? BooleanPolynomial::constant(1) : BooleanPolynomial::variable(q_name(j));
  }

  BooleanPolynomial carry(int column) const {
    if (column < 0) return {};
    const Carry& c = carries.at(static_cast<std::size_t>(column));
    BooleanPolynomial out = BooleanPolynomial::constant(c.offset);
    for (std::size_t b = 0; b < c.bits.size(); ++b) {
      out += BooleanPolynomial::variable(c.bits[b], std::int64_t{1} << b);
    }
    return out;
  }

  /// Builds the instance and its carry layout.
  ///
  /// Carry ranges are propagated from the least significant column upwards:
  /// the column total ranges over [constant products + carry-in min,
  /// all products + carry-in max], and the outgoing carry over
  /// [ceil((lo - n_m) / 2), floor((hi - n_m) / 2)]. The carry out of the top
  /// column must equal the bits of n above it, so it is a constant.
  static FactorInstance make(std::uint64_t n, int l_p, int l_q) {
    if (n % 2 == 0) throw InvalidInput("n must be odd");
    FactorInstance inst;
    inst.n = n;
    inst.bits = bit_decompose(n);
    inst.l_n = static_cast<int>(inst.bits.size());
    inst.l_p = l_p;
    inst.l_q = l_q;
    if (l_p < 2 || l_q < 2) throw InvalidInput("factor bit-lengths must be at least 2");
    if (l_p + l_q != inst.l_n && l_p + l_q != inst.l_n + 1) {
      throw InvalidInput("l_p + l_q must equal l_n or l_n + 1");
    }
    int qubit = 0;
    for (int j = 1; j <= l_p - 2; ++j) inst.variable_layout.push_back({p_name(j), qubit++});
    for (int j = 1; j <= l_q - 2; ++j) inst.variable_layout.push_back({q_name(j), qubit++});

    const int top = inst.top_column();
    std::int64_t in_lo = 0;
    std::int64_t in_hi = 0;
    for (int m = 0; m <= top; ++m) {
      const int k_lo = std::max(0, m - l_p + 1);
      const int k_hi = std::min(m, l_q - 1);
      std::int64_t fixed = 0;
      std::int64_t count = 0;
      for (int k = k_lo; k <= k_hi; ++k) {
        const int j = m - k;
        const bool p_fixed = (j == 0 || j == l_p - 1);
        const bool q_fixed = (k == 0 || k == l_q - 1);
        ++count;
        if (p_fixed && q_fixed) ++fixed;
      }
      Carry c;
      c.column = m;
      if (m == top) {
        c.offset = static_cast<std::int64_t>(n >> (top + 1));
        c.max = c.offset;
      } else {
        const std::int64_t nm = inst.bit(m);
        const std::int64_t lo = fixed + in_lo - nm;
        const std::int64_t hi = count + in_hi - nm;
        c.offset = std::max<std::int64_t>(0, lo <= 0 ? 0 : (lo + 1) / 2);
        c.max = std::max(c.offset, hi < 0 ? std::int64_t{0} : hi / 2);
        const std::int64_t span = c.max - c.offset;
        int width = 0;
        while ((std::int64_t{1} << width) <= span) ++width;
        if (width > 30) throw InvalidInput("carry bound overflow");
        for (int b = 0; b < width; ++b) {
          std::string name = "c" + std::to_string(m);
          if (width > 1) name += "_" + std::to_string(b);
          c.bits.push_back(name);
          inst.variable_layout.push_back({name, qubit++});
        }
      }
      in_lo = c.offset;
      in_hi = c.max;
      inst.carries.push_back(std::move(c));
    }
    return inst;
  }

  static FactorInstance make(std::uint64_t n) {
    const int l = default_factor_length(bit_length(n));
    return make(n, l, l);
  }

  int bit(int i) const {
    return i < static_cast<int>(bits.size()) ? bits[static_cast<std::size_t>(i)] : 0;
  }

  /// Assignment read from a basis index through the variable layout.
  Assignment assignment(Index index) const {
    Assignment x;
    const int nq = n_qubits();
    for (const auto& v : variable_layout) x[v.name] = qubit_value(index, nq, v.qubit);
    return x;
  }

  std::uint64_t p_value(const Assignment& x) const { return factor_value(x, 'p', l_p); }
  std::uint64_t q_value(const Assignment& x) const { return factor_value(x, 'q', l_q); }

  std::int64_t carry_value(int column, const Assignment& x) const { return carry(column).evaluate(x); }

 private:
  std::uint64_t factor_value(const Assignment& x, char which, int l) const {
    std::uint64_t v = 1u | (std::uint64_t{1} << (l - 1));
    for (int j = 1; j <= l - 2; ++j) {
      const std::string name = std::string(1, which) + std::to_string(j);
      if (x.at(name)) v |= std::uint64_t{1} << j;
    }
    return v;
  }
};

/// Every (l_p, l_q) split admitted for n: both at least 2, sum l_n or l_n + 1.
inline std::vector<std::pair<int, int>> factor_splits(std::uint64_t n) {
  const int l_n = bit_length(n);
  std::vector<std::pair<int, int>> out;
  for (int lp = 2; lp <= l_n; ++lp) {
    for (int lq : {l_n - lp, l_n + 1 - lp}) {
      if (lq >= 2) out.emplace_back(lp, lq);
    }
  }
  return out;
}

/// E = sum_m f_m^2 over the instance's variables.
inline BooleanPolynomial build_cost(const FactorInstance& inst) {
  BooleanPolynomial energy;
  const int top = inst.top_column();
  for (int m = 0; m <= top; ++m) {
    BooleanPolynomial f;
    const int k_lo = std::max(0, m - inst.l_p + 1);
    const int k_hi = std::min(m, inst.l_q - 1);
    for (int k = k_lo; k <= k_hi; ++k) f += inst.p_bit(m - k) * inst.q_bit(k);
    f += inst.carry(m - 1);
    BooleanPolynomial out_carry = inst.carry(m);
    for (const auto& [mono, c] : out_carry.terms()) f.add(mono, -2 * c);
    f.add({}, -inst.bit(m));
    energy += f * f;
  }
  return energy;
}

/// Substitutes b = (1 - z) / 2 for every variable. Qubit value 0 means z = +1,
/// so the diagonal at each basis index equals the Boolean value there.
inline ZPolynomial boolean_to_zpoly(const BooleanPolynomial& poly, const std::map<std::string, int>& layout,
                                    std::optional<int> n_qubits = std::nullopt) {
  int nq = n_qubits.value_or(0);
  if (!n_qubits) {
    for (const auto& [name, q] : layout) nq = std::max(nq, q + 1);
  }
  ZPolynomial out(nq);
  for (const auto& [mono, c] : poly.terms()) {
    Mask support = 0;
    for (const auto& v : mono) {
      auto it = layout.find(v);
      if (it == layout.end()) throw InvalidInput("variable " + v + " has no qubit");
      if (it->second < 0 || it->second >= nq) throw InvalidInput("qubit index out of range for " + v);
      support |= qubit_mask(nq, it->second);
    }
    const double scale = static_cast<double>(c) / static_cast<double>(std::uint64_t{1} << mono.size());
    // Expand prod (1 - z_i) over all submasks of the support.
    for (Mask sub = support;; sub = (sub - 1) & support) {
      out.add(sub, parity(sub) ? -scale : scale);
      if (sub == 0) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct GroundStates {
  double energy = 0.0;
  std::vector<Index> states;  // ascending
};

inline GroundStates brute_force_ground_states(const ZPolynomial& h) {
  if (h.n_qubits() > kEnumerationGuard) throw SizeGuard("enumeration limited to 24 qubits");
  const auto diag = zpoly_diagonal(h);
  GroundStates g;
  g.energy = *std::min_element(diag.begin(), diag.end());
  for (Index m = 0; m < diag.size(); ++m) {
    if (std::abs(diag[m] - g.energy) <= kDegeneracyTol) g.states.push_back(m);
  }
  return g;
}

inline bool verify_truncation(const ZPolynomial& full, const ZPolynomial& truncated) {
  if (full.n_qubits() != truncated.n_qubits()) throw InvalidInput("qubit counts differ");
  return brute_force_ground_states(full).states == brute_force_ground_states(truncated).states;
}

// ---------------------------------------------------------------------------

/// Where one inner factor bit is read from.
struct BitSource {
  int qubit = 0;
  bool complement = false;
  friend bool operator==(const BitSource&, const BitSource&) = default;
};

/// Maps a basis index to a factor pair. Entry j-1 of `p_bits` gives bit j of
/// p (j = 1..l_p-2); bits 0 and l_p-1 are padded with 1. For the catalog
/// rules this is "reverse the qubit label and pad with 1 on both ends".
struct DecodingRule {
  int n_qubits = 0;
  int l_p = 2;
  int l_q = 2;
  std::vector<BitSource> p_bits;
  std::vector<BitSource> q_bits;

  /// Qubit k feeds bit k of p, and bit k of q is its complement.
  static DecodingRule complement_pairing(int n_qubits) {
    DecodingRule r;
    r.n_qubits = n_qubits;
    r.l_p = r.l_q = n_qubits + 2;
    for (int q = 0; q < n_qubits; ++q) {
      r.p_bits.push_back({q, false});
      r.q_bits.push_back({q, true});
    }
    return r;
  }

  static DecodingRule from_instance(const FactorInstance& inst) {
    DecodingRule r;
    r.n_qubits = inst.n_qubits();
    r.l_p = inst.l_p;
    r.l_q = inst.l_q;
    const auto layout = inst.layout();
    for (int j = 1; j <= inst.l_p - 2; ++j) r.p_bits.push_back({layout.at(FactorInstance::p_name(j)), false});
    for (int j = 1; j <= inst.l_q - 2; ++j) r.q_bits.push_back({layout.at(FactorInstance::q_name(j)), false});
    return r;
  }

  friend bool operator==(const DecodingRule&, const DecodingRule&) = default;
};

inline std::pair<std::uint64_t, std::uint64_t> decode_factors(Index state, const DecodingRule& rule) {
  if (rule.n_qubits < 64 && state >= dimension(rule.n_qubits)) throw InvalidInput("basis index out of range");
  auto assemble = [&](const std::vector<BitSource>& src, int l) {
    std::uint64_t v = 1u | (std::uint64_t{1} << (l - 1));
    for (std::size_t j = 0; j < src.size(); ++j) {
      const bool b = qubit_value(state, rule.n_qubits, src[j].qubit) != src[j].complement;
      if (b) v |= std::uint64_t{1} << (j + 1);
    }
    return v;
  };
  return {assemble(rule.p_bits, rule.l_p), assemble(rule.q_bits, rule.l_q)};
}

}  // namespace falqon
