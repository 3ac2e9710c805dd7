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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "falqon/encoder.hpp"
#include "falqon/zpoly.hpp"

namespace falqon {

enum class Variant { full, truncated };

inline std::string to_string(Variant v) { return v == Variant::full ? "full" : "truncated"; }

inline Variant parse_variant(const std::string& s) {
  if (s == "full") return Variant::full;
  if (s == "truncated") return Variant::truncated;
  throw InvalidInput("unknown variant '" + s + "' (expected full or truncated)");
}

/// One reduced problem Hamiltonian with its factor read-out.
struct CatalogEntry {
  std::uint64_t n = 0;
  Variant variant = Variant::full;
  ZPolynomial hamiltonian;
  DecodingRule rule;
  std::pair<std::uint64_t, std::uint64_t> factors;  // expected (p, q), p < q
  std::string note;

  std::string key() const { return std::to_string(n) + "/" + to_string(variant); }
};

namespace detail {

// (coefficient, 1-based qubit labels)
struct RawTerm {
  double coeff;
  std::vector<int> labels;
};

inline ZPolynomial from_raw(int n_qubits, const std::vector<RawTerm>& raw) {
  ZPolynomial h(n_qubits);
  for (const auto& t : raw) h.add(h.mask_from_labels(t.labels), t.coeff);
  return h;
}

inline ZPolynomial hp_551() {
  return from_raw(3, {{0.25, {1, 2}}, {-0.25, {2, 3}}, {0.25, {1, 3}}});
}

inline ZPolynomial hp_9167_full() {
  return from_raw(5, {{-1, {1, 2}},
                      {1, {1, 3}},
                      {2, {1, 4}},
                      {2, {2, 3}},
                      {-2, {2, 5}},
                      {-2, {3, 4}},
                      {1, {3, 5}},
                      {1, {4, 5}},
                      {1, {1, 2, 3, 4}},
                      {1, {1, 2, 4, 5}},
                      {1, {2, 3, 4, 5}}});
}

inline ZPolynomial hp_9167_truncated() {
  return from_raw(5, {{-1, {1, 2}}, {2, {1, 4}}, {2, {2, 3}}, {-2, {2, 5}}});
}

inline ZPolynomial hp_2106287_full() {
  std::vector<RawTerm> raw;
  auto pairs = [&](int a, std::initializer_list<std::pair<double, int>> rest) {
    for (const auto& [c, b] : rest) raw.push_back({c, {a, b}});
  };
  pairs(1, {{-1, 2}, {1, 3}, {-2, 5}, {-1, 6}, {-1, 7}, {-2, 8}, {-2, 9}});
  pairs(2, {{-2, 4}, {-1, 5}, {-1, 6}, {-2, 7}, {-2, 8}, {-2, 9}});
  pairs(3, {{-1, 4}, {-1, 5}, {-2, 6}, {-2, 7}, {-2, 8}, {-1, 9}});
  pairs(4, {{-2, 5}, {-2, 6}, {-2, 7}, {-1, 8}, {-3, 9}});
  pairs(5, {{-2, 6}, {-1, 7}, {-3, 8}, {-2, 9}});
  pairs(6, {{-3, 7}, {-2, 8}, {-2, 9}});
  pairs(7, {{-2, 8}, {-1, 9}});
  pairs(8, {{-1, 9}});
  auto quads = [&](int a, int b, std::initializer_list<std::pair<int, int>> rest) {
    for (const auto& [c, d] : rest) raw.push_back({1, {a, b, c, d}});
  };
  quads(1, 2, {{3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 9}});
  quads(1, 3, {{4, 6}, {5, 7}, {6, 8}, {7, 9}});
  quads(1, 4, {{5, 8}, {6, 9}});
  quads(2, 3, {{4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 9}});
  quads(2, 4, {{5, 7}, {6, 8}, {7, 9}});
  quads(2, 5, {{6, 9}});
  quads(3, 4, {{5, 6}, {6, 7}, {7, 8}, {8, 9}});
  quads(3, 5, {{6, 8}, {7, 9}});
  quads(4, 5, {{6, 7}, {7, 8}, {8, 9}});
  quads(4, 6, {{7, 9}});
  quads(5, 6, {{7, 8}, {8, 9}});
  quads(6, 7, {{8, 9}});
  return from_raw(9, raw);
}

inline ZPolynomial hp_2106287_truncated() {
  return from_raw(9, {{-2, {2, 7}},
                      {1, {1, 2, 3, 4}},
                      {1, {2, 3, 4, 5}},
                      {1, {2, 3, 5, 6}},
                      {1, {2, 3, 6, 7}},
                      {1, {2, 3, 7, 8}},
                      {1, {2, 3, 8, 9}},
                      {1, {3, 4, 5, 6}}});
}

inline const char* kReconstructedRule =
    "decoding rule reconstructed by enumerating the ground states of the full Hamiltonian: "
    "qubit k gives bit k of p, bit k of q is its complement";

}  // namespace detail

/// The built-in catalog, in a fixed order.
inline std::vector<CatalogEntry> builtin_catalog() {
  std::vector<CatalogEntry> out;
  out.push_back({551, Variant::full, detail::hp_551(), DecodingRule::complement_pairing(3), {19, 29},
                 "three-qubit reduced Hamiltonian; ground states |011> and |100>"});
  out.push_back({9167, Variant::full, detail::hp_9167_full(), DecodingRule::complement_pairing(5), {89, 103},
                 detail::kReconstructedRule});
  out.push_back({9167, Variant::truncated, detail::hp_9167_truncated(), DecodingRule::complement_pairing(5),
                 {89, 103}, detail::kReconstructedRule});
  out.push_back({2106287, Variant::full, detail::hp_2106287_full(), DecodingRule::complement_pairing(9),
                 {1033, 2039}, detail::kReconstructedRule});
  out.push_back({2106287, Variant::truncated, detail::hp_2106287_truncated(), DecodingRule::complement_pairing(9),
                 {1033, 2039}, detail::kReconstructedRule});
  return out;
}

inline const CatalogEntry& find_entry(const std::vector<CatalogEntry>& catalog, std::uint64_t n, Variant variant) {
  bool known_n = false;
  for (const auto& e : catalog) {
    if (e.n != n) continue;
    known_n = true;
    if (e.variant == variant) return e;
  }
  if (!known_n) throw CatalogMiss("no catalog Hamiltonian for n = " + std::to_string(n));
  throw UnsupportedVariant("variant '" + to_string(variant) + "' is not available for n = " + std::to_string(n));
}

inline std::pair<ZPolynomial, DecodingRule> catalog_hamiltonian(std::uint64_t n, Variant variant) {
  static const std::vector<CatalogEntry> catalog = builtin_catalog();
  const auto& e = find_entry(catalog, n, variant);
  return {e.hamiltonian, e.rule};
}

/// Basis states whose decoding multiplies to n.
inline std::vector<Index> solution_states(const DecodingRule& rule, std::uint64_t n) {
  std::vector<Index> out;
  for (Index m = 0; m < dimension(rule.n_qubits); ++m) {
    const auto [p, q] = decode_factors(m, rule);
    if (p * q == n) out.push_back(m);
  }
  return out;
}

}  // namespace falqon
