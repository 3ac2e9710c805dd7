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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "falqon/catalog.hpp"
#include "falqon/io.hpp"

using namespace falqon;

namespace {

ZPolynomial terms(int n, std::initializer_list<std::pair<double, std::initializer_list<int>>> t) {
  ZPolynomial h(n);
  for (const auto& [c, labels] : t) h.add_labels(labels, c);
  return h;
}

std::vector<std::string> bitstrings(const std::vector<Index>& states, int n) {
  std::vector<std::string> out;
  for (Index m : states) out.push_back(bitstring(m, n));
  return out;
}

}  // namespace

TEST(Catalog, ThreeQubitHamiltonian) {
  const auto [h, rule] = catalog_hamiltonian(551, Variant::full);
  EXPECT_EQ(h.terms(), terms(3, {{0.25, {1, 2}}, {-0.25, {2, 3}}, {0.25, {1, 3}}}).terms());
  EXPECT_EQ(rule, DecodingRule::complement_pairing(3));
}

TEST(Catalog, NineOneSixSevenTruncated) {
  const auto [h, rule] = catalog_hamiltonian(9167, Variant::truncated);
  // z1(-z2 + 2 z4) + 2 z2 (z3 - z5)
  EXPECT_EQ(h.terms(), terms(5, {{-1, {1, 2}}, {2, {1, 4}}, {2, {2, 3}}, {-2, {2, 5}}}).terms());
}

TEST(Catalog, NineOneSixSevenFullTermCount) {
  const auto [h, rule] = catalog_hamiltonian(9167, Variant::full);
  EXPECT_EQ(h.terms().size(), 11u);
  EXPECT_EQ(h.coefficient(h.mask_from_labels({3, 4})), -2.0);
  EXPECT_EQ(h.coefficient(h.mask_from_labels({1, 2, 4, 5})), 1.0);
  EXPECT_EQ(h.max_degree(), 4);
}

TEST(Catalog, LargeEntriesShape) {
  const auto [full, r1] = catalog_hamiltonian(2106287, Variant::full);
  const auto [trunc, r2] = catalog_hamiltonian(2106287, Variant::truncated);
  EXPECT_EQ(full.n_qubits(), 9);
  EXPECT_EQ(trunc.terms().size(), 8u);
  EXPECT_EQ(full.coefficient(full.mask_from_labels({4, 9})), -3.0);
  EXPECT_EQ(full.coefficient(full.mask_from_labels({6, 7, 8, 9})), 1.0);
}

TEST(Catalog, MissesAndVariants) {
  EXPECT_THROW(catalog_hamiltonian(10, Variant::full), CatalogMiss);
  EXPECT_THROW(catalog_hamiltonian(551, Variant::truncated), UnsupportedVariant);
  EXPECT_THROW(parse_variant("half"), InvalidInput);
}

TEST(Catalog, ThreeQubitDiagonal) {
  const auto diag = zpoly_diagonal(catalog_hamiltonian(551, Variant::full).first);
  EXPECT_EQ(diag, (std::vector<double>{0.25, 0.25, 0.25, -0.75, -0.75, 0.25, 0.25, 0.25}));
}

TEST(Catalog, ThreeQubitGroundStates) {
  const auto g = brute_force_ground_states(catalog_hamiltonian(551, Variant::full).first);
  EXPECT_EQ(g.energy, -0.75);
  EXPECT_EQ(bitstrings(g.states, 3), (std::vector<std::string>{"011", "100"}));
}

TEST(Catalog, GlobalFlipSymmetry) {
  for (const auto& e : builtin_catalog()) {
    const auto diag = zpoly_diagonal(e.hamiltonian);
    const Index all = dimension(e.hamiltonian.n_qubits()) - 1;
    // Only even-degree terms survive, so the diagonal is flip invariant.
    for (Index m = 0; m <= all; ++m) ASSERT_EQ(diag[m], diag[m ^ all]) << e.key();
  }
}

TEST(Catalog, EveryEntryDecodesToItsFactors) {
  for (const auto& e : builtin_catalog()) {
    const auto g = brute_force_ground_states(e.hamiltonian);
    ASSERT_EQ(g.states.size(), 2u) << e.key();
    for (Index m : g.states) {
      auto [p, q] = decode_factors(m, e.rule);
      EXPECT_EQ(p * q, e.n) << e.key();
      EXPECT_EQ(std::min(p, q), e.factors.first);
      EXPECT_EQ(std::max(p, q), e.factors.second);
    }
    EXPECT_EQ(g.states, solution_states(e.rule, e.n)) << e.key();
  }
}

TEST(Catalog, PinnedGroundStatesOfLargeEntries) {
  for (auto v : {Variant::full, Variant::truncated}) {
    const auto g5 = brute_force_ground_states(catalog_hamiltonian(9167, v).first);
    EXPECT_EQ(bitstrings(g5.states, 5), (std::vector<std::string>{"00110", "11001"}));
    const auto g9 = brute_force_ground_states(catalog_hamiltonian(2106287, v).first);
    EXPECT_EQ(bitstrings(g9.states, 9), (std::vector<std::string>{"001000000", "110111111"}));
  }
}

TEST(Truncation, SameGroundSets) {
  EXPECT_TRUE(verify_truncation(catalog_hamiltonian(9167, Variant::full).first,
                                catalog_hamiltonian(9167, Variant::truncated).first));
  EXPECT_TRUE(verify_truncation(catalog_hamiltonian(2106287, Variant::full).first,
                                catalog_hamiltonian(2106287, Variant::truncated).first));
  const auto h = catalog_hamiltonian(551, Variant::full).first;
  EXPECT_TRUE(verify_truncation(h, h));
  EXPECT_FALSE(verify_truncation(h, terms(3, {{0.25, {1, 2}}})));
}

TEST(Truncation, SizeMismatchRejected) {
  EXPECT_THROW(verify_truncation(ZPolynomial(3), ZPolynomial(5)), InvalidInput);
}

TEST(CatalogJson, RoundTrip) {
  const auto cat = builtin_catalog();
  const auto back = catalog_from_json(json::parse(catalog_to_json(cat).dump()));
  ASSERT_EQ(back.size(), cat.size());
  for (std::size_t i = 0; i < cat.size(); ++i) {
    EXPECT_EQ(back[i].hamiltonian.terms(), cat[i].hamiltonian.terms());
    EXPECT_EQ(back[i].rule, cat[i].rule);
    EXPECT_EQ(back[i].factors, cat[i].factors);
  }
}

TEST(CatalogJson, ShippedFileMatchesBuiltin) {
  const auto shipped = read_json_file(std::string(FALQON_SOURCE_DIR) + "/data/catalog.json");
  EXPECT_EQ(shipped, catalog_to_json(builtin_catalog()));
}

TEST(CatalogJson, SchemaErrors) {
  auto j = catalog_to_json(builtin_catalog());
  auto bad = j;
  bad["extra"] = 1;
  EXPECT_THROW(catalog_from_json(bad), SchemaError);
  bad = j;
  bad["entries"] = json::array();
  EXPECT_THROW(catalog_from_json(bad), SchemaError);
  bad = j;
  bad["entries"][0]["n_qubits"] = 4;
  EXPECT_THROW(catalog_from_json(bad), SchemaError);
  bad = j;
  bad["entries"][0]["hamiltonian"]["terms"][0]["mask"] = "1x0";
  EXPECT_THROW(catalog_from_json(bad), SchemaError);
  const std::string empty = testing::TempDir() + "empty_catalog.json";
  std::ofstream(empty).close();
  EXPECT_THROW(read_catalog_file(empty), SchemaError);
}
