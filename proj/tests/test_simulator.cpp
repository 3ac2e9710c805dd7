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

#include "falqon/catalog.hpp"
#include "falqon/evolution.hpp"
#include "oracles.hpp"

using namespace falqon;

namespace {

const ZPolynomial& h551() {
  static const ZPolynomial h = catalog_hamiltonian(551, Variant::full).first;
  return h;
}

const std::vector<Index> kSol551{parse_bitstring("011"), parse_bitstring("100")};

QuantumState basis_state(int n, const std::string& bits) {
  InitOptions o;
  o.kind = InitKind::explicit_amplitudes;
  o.amplitudes = oracle::basis(n, static_cast<int>(parse_bitstring(bits)));
  return init_state(n, o);
}

QuantumState uniform(int n) { return init_state(n); }

std::vector<QuantumState> random_states(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<QuantumState> out;
  for (int i = 0; i < count; ++i) {
    if (i % 2 == 0) {
      out.push_back(QuantumState::pure(oracle::random_pure(n, rng)));
    } else {
      out.push_back(QuantumState::mixed(oracle::random_density(n, rng)));
    }
  }
  return out;
}

double density_distance(const QuantumState& s, const oracle::Mat& rho) {
  const oracle::Mat m = s.backend() == Backend::pure ? oracle::Mat(s.amplitudes() * s.amplitudes().adjoint())
                                                      : s.matrix();
  return (m - rho).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(InitState, ZeroAndUniform) {
  InitOptions o;
  o.kind = InitKind::zero;
  const auto z = init_state(3, o);
  EXPECT_EQ(z.amplitudes()(0), oracle::Complex(1.0));
  const auto u = uniform(3);
  for (double p : u.diagonal_weights()) EXPECT_NEAR(p, 0.125, 1e-15);
  EXPECT_NEAR(basis_probabilities(u, kSol551).p_sol, 0.25, 1e-15);
}

TEST(InitState, ThermalBeforePulse) {
  InitOptions o;
  o.kind = InitKind::thermal;
  o.epsilon = 1e-3;
  o.rotate_y90 = false;
  const auto s = init_state(3, o);
  EXPECT_NEAR(s.diagonal_weights()[0], (1 + 3e-3) / 8, 1e-15);
  EXPECT_NEAR(s.norm_or_trace(), 1.0, 1e-14);
  EXPECT_NEAR(basis_probabilities(s, kSol551).p_sol, 0.25, 1e-15);
}

TEST(InitState, ThermalPulseMatchesOracle) {
  InitOptions o;
  o.kind = InitKind::thermal;
  o.epsilon = 0.2;
  const auto s = init_state(3, o);
  oracle::Mat rho = oracle::Mat::Identity(8, 8);
  for (int k = 1; k <= 3; ++k) rho += 0.2 * oracle::pauli(oracle::on(3, {k}));
  rho /= 8.0;
  oracle::Mat u = oracle::Mat::Identity(8, 8);
  for (int k = 1; k <= 3; ++k) u = oracle::expm(oracle::pauli(oracle::on(3, {k}, 'Y')), kPi / 4) * u;
  EXPECT_LT(density_distance(s, u * rho * u.adjoint()), 1e-14);
}

TEST(InitState, DeviationStartReportsQuarter) {
  InitOptions o;
  o.kind = InitKind::thermal;
  o.deviation = true;
  for (bool rotate : {false, true}) {
    o.rotate_y90 = rotate;
    const auto s = init_state(3, o);
    EXPECT_TRUE(s.deviation_mode());
    EXPECT_NEAR(s.kappa(), 1.0 / 3, 1e-15);
    EXPECT_NEAR(s.norm_or_trace(), 0.0, 1e-14);
    EXPECT_NEAR(basis_probabilities(s, kSol551).p_sol, 0.25, 1e-14);
  }
  // Unrotated, the extreme populations are 1/8 +- kappa * 3/8 = 1/4 and 0.
  o.rotate_y90 = false;
  const auto w = init_state(3, o).diagonal_weights();
  EXPECT_NEAR(w[0], 0.25, 1e-15);
  EXPECT_NEAR(w[7], 0.0, 1e-15);
}

TEST(InitState, Guards) {
  EXPECT_THROW(init_state(0), InvalidInput);
  InitOptions o;
  o.kind = InitKind::thermal;
  EXPECT_THROW(init_state(13, o), SizeGuard);
  o.epsilon = 0.0;
  EXPECT_THROW(init_state(3, o), InvalidInput);
  EXPECT_THROW(QuantumState::pure(oracle::Vec::Ones(4)), InvalidInput);
  EXPECT_THROW(QuantumState::pure(oracle::Vec::Ones(3) / std::sqrt(3.0)), InvalidInput);
}

TEST(ProblemPhase, BasisStatePhase) {
  auto s = basis_state(3, "011");
  apply_problem_phase(s, h551(), 0.2);
  const auto a = s.amplitudes()(3);
  EXPECT_NEAR(std::arg(a), 0.15, 1e-15);
  EXPECT_NEAR(std::abs(a), 1.0, 1e-15);
}

TEST(ProblemPhase, ZeroTimeAndUniformProbabilities) {
  for (const auto& st : random_states(3, 6, 11)) {
    auto s = st;
    apply_problem_phase(s, h551(), 0.0);
    EXPECT_LT(density_distance(s, st.backend() == Backend::pure
                                      ? oracle::Mat(st.amplitudes() * st.amplitudes().adjoint())
                                      : st.matrix()),
              1e-15);
    apply_problem_phase(s, h551(), 0.37);
    const auto before = st.diagonal_weights();
    const auto after = s.diagonal_weights();
    for (std::size_t m = 0; m < before.size(); ++m) EXPECT_NEAR(before[m], after[m], 1e-14);
  }
}

TEST(ProblemPhase, MatchesExponential) {
  const auto h = catalog_hamiltonian(9167, Variant::full).first;
  std::mt19937_64 rng(5);
  const oracle::Vec psi = oracle::random_pure(5, rng);
  auto s = QuantumState::pure(psi);
  apply_problem_phase(s, h, 0.3);
  oracle::Mat hm = oracle::Mat::Zero(32, 32);
  for (const auto& [mask, c] : h.terms()) {
    std::string str(5, 'I');
    for (int l : h.labels(mask)) str[static_cast<std::size_t>(l - 1)] = 'Z';
    hm += c * oracle::pauli(str);
  }
  EXPECT_LT((s.amplitudes() - oracle::expm(hm, 0.3) * psi).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Drive, IdentityAtZero) {
  auto s = uniform(3);
  apply_drive(s, 0.0, default_drive_weights(3));
  EXPECT_LT((s.amplitudes() - oracle::uniform(3)).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Drive, PiFlipsOneQubit) {
  auto s = basis_state(1, "0");
  apply_drive(s, kPi, default_drive_weights(1));
  EXPECT_NEAR(std::abs(s.amplitudes()(0)), 0.0, 1e-15);
  EXPECT_NEAR(s.amplitudes()(1).real(), 0.0, 1e-15);
  EXPECT_NEAR(s.amplitudes()(1).imag(), -1.0, 1e-15);
}

TEST(Drive, MatchesExponentialOnMixedStates) {
  const std::vector<double> w{0.5, 0.2, -0.4};
  for (const auto& st : random_states(3, 4, 3)) {
    auto s = st;
    apply_drive(s, 0.83, w);
    const oracle::Mat u = oracle::expm(oracle::drive(w), 0.83);
    const oracle::Mat rho0 = st.backend() == Backend::pure ? oracle::Mat(st.amplitudes() * st.amplitudes().adjoint())
                                                           : st.matrix();
    EXPECT_LT(density_distance(s, u * rho0 * u.adjoint()), 1e-13);
  }
}

TEST(Drive, Composes) {
  const auto w = default_drive_weights(3);
  for (const auto& st : random_states(3, 6, 21)) {
    auto a = st;
    auto b = st;
    apply_drive(a, 0.3, w);
    apply_drive(a, -1.1, w);
    apply_drive(b, -0.8, w);
    const oracle::Mat rb = b.backend() == Backend::pure ? oracle::Mat(b.amplitudes() * b.amplitudes().adjoint())
                                                        : b.matrix();
    EXPECT_LT(density_distance(a, rb), 1e-12);
  }
}

TEST(Drive, RejectsBadInput) {
  auto s = uniform(2);
  EXPECT_THROW(apply_drive(s, std::nan(""), default_drive_weights(2)), InvalidInput);
  EXPECT_THROW(apply_drive(s, 0.1, default_drive_weights(3)), InvalidInput);
}

TEST(Noise, FirstDrawUsesFixedArithmetic) {
  NoiseModel nm{.dtheta = 0.1, .dphi = 0.0, .seed = 42, .flip_error = FlipError::relative};
  PulseNoise pn(nm);
  std::mt19937_64 ref(42);
  const double u = static_cast<double>(ref() >> 11) / 9007199254740992.0;
  const auto d = pn.next();
  EXPECT_DOUBLE_EQ(d.gain, 0.1 * (2 * u - 1));
  EXPECT_EQ(d.offset, 0.0);
  EXPECT_EQ(d.phase, 0.0);
}

TEST(Noise, AdditiveModelUsesOffset) {
  PulseNoise pn({.dtheta = 0.1, .dphi = 0.05, .seed = 1, .flip_error = FlipError::additive});
  for (int i = 0; i < 100; ++i) {
    const auto d = pn.next();
    EXPECT_EQ(d.gain, 0.0);
    EXPECT_LE(std::abs(d.offset), 0.1);
    EXPECT_LE(std::abs(d.phase), 0.05);
  }
}

TEST(Noise, NoisyPulseAngleReplays) {
  const NoiseModel nm{.dtheta = 0.1, .dphi = 0.0, .seed = 9, .flip_error = FlipError::relative};
  auto run = [&](const NoiseModel& m) {
    auto s = basis_state(1, "0");
    PulseNoise pn(m);
    apply_drive(s, kPi / 2, default_drive_weights(1), pn);
    return s.amplitudes();
  };
  const auto a = run(nm);
  EXPECT_EQ(a, run(nm));
  auto other = nm;
  other.seed = 10;
  EXPECT_NE(a, run(other));
  PulseNoise pn(nm);
  const double angle = kPi / 2 * (1 + pn.next().gain) * 0.5;
  EXPECT_NEAR(std::abs(a(1)), std::sin(angle), 1e-15);
}

TEST(Noise, Validation) {
  EXPECT_THROW(PulseNoise(NoiseModel{.dtheta = -0.1, .dphi = 0, .seed = 0, .flip_error = FlipError::relative}),
               InvalidInput);
  EXPECT_THROW(parse_flip_error("multiplicative"), InvalidInput);
  EXPECT_THROW(RfModel::grid(1000, 1.0), InvalidInput);
  EXPECT_THROW(RfModel::grid(0, 0.1), InvalidInput);
  const auto rf = RfModel::grid(1000, 0.3);
  ASSERT_EQ(rf.members.size(), 7u);
  EXPECT_NEAR(rf.members.front().scale, 0.7, 1e-15);
  EXPECT_NEAR(rf.members[3].scale, 1.0, 1e-15);
  EXPECT_NEAR(rf.members.back().scale, 1.3, 1e-15);
}

TEST(Energy, Examples) {
  InitOptions o;
  o.kind = InitKind::explicit_amplitudes;
  o.amplitudes = (oracle::basis(3, 3) + oracle::basis(3, 4)) / std::sqrt(2.0);
  EXPECT_NEAR(expectation_energy(init_state(3, o), h551()), -0.75, 1e-15);
  EXPECT_NEAR(expectation_energy(uniform(3), h551()), 0.0, 1e-16);
  EXPECT_NEAR(expectation_energy(basis_state(3, "000"), h551()), 0.25, 1e-16);
}

TEST(Commutator, ZeroOnBasisStates) {
  const auto c = commutator_with_drive(h551(), default_drive_weights(3));
  for (Index m = 0; m < 8; ++m) {
    const auto s = basis_state(3, bitstring(m, 3));
    EXPECT_EQ(expectation_commutator(s, c, MeasurementMode::direct), 0.0);
    EXPECT_NEAR(expectation_commutator(s, c, MeasurementMode::tomography), 0.0, 1e-15);
  }
}

TEST(Commutator, UniformAndAfterOneProblemLayer) {
  const auto c = commutator_with_drive(h551(), default_drive_weights(3));
  const oracle::Mat hp =
      0.25 * (oracle::pauli("ZZI") - oracle::pauli("IZZ") + oracle::pauli("ZIZ"));
  const oracle::Mat cm = oracle::commutator_i(hp, oracle::drive({0.5, 0.5, 0.5}));
  auto s = uniform(3);
  EXPECT_NEAR(expectation_commutator(s, c, MeasurementMode::direct), oracle::expect(oracle::uniform(3), cm), 1e-15);
  EXPECT_NEAR(expectation_commutator(s, c, MeasurementMode::tomography), 0.0, 1e-15);
  apply_problem_phase(s, h551(), 0.2);
  const oracle::Vec psi = oracle::expm(hp, 0.2) * oracle::uniform(3);
  const double want = oracle::expect(psi, cm);
  EXPECT_GT(std::abs(want), 0.1);
  EXPECT_NEAR(expectation_commutator(s, c, MeasurementMode::direct), want, 1e-12);
  EXPECT_NEAR(expectation_commutator(s, c, MeasurementMode::tomography), want, 1e-10);
}

TEST(Commutator, RealAndModeIndependentOnRandomStates) {
  for (const auto& e : builtin_catalog()) {
    const int n = e.hamiltonian.n_qubits();
    if (n > 5) continue;
    const auto c = commutator_with_drive(e.hamiltonian, default_drive_weights(n));
    const auto groups = tomography_groups(c);
    const oracle::Mat cm = dense(c);
    for (const auto& s : random_states(n, 100, 1000 + static_cast<std::uint64_t>(n))) {
      const auto z = s.expectation_complex(c);
      EXPECT_LT(std::abs(z.imag()), 1e-12);
      EXPECT_NEAR(z.real(), expectation_tomography(s, groups), 1e-10) << e.key();
      const oracle::Mat rho = s.backend() == Backend::pure ? oracle::Mat(s.amplitudes() * s.amplitudes().adjoint())
                                                           : s.matrix();
      EXPECT_NEAR(z.real(), (rho * cm).trace().real(), 1e-12);
    }
  }
}

TEST(Probabilities, Examples) {
  EXPECT_NEAR(basis_probabilities(uniform(3), kSol551).p_sol, 0.25, 1e-15);
  EXPECT_NEAR(basis_probabilities(basis_state(3, "100"), kSol551).p_sol, 1.0, 1e-15);
  EXPECT_THROW(basis_probabilities(uniform(2), kSol551), InvalidInput);
}

TEST(Invariants, NormAndTracePreserved) {
  const auto w = default_drive_weights(4);
  ZPolynomial h(4);
  h.add_labels({1, 2}, 0.7).add_labels({2, 3, 4}, -1.3).add_labels({4}, 0.2);
  PulseNoise pn({.dtheta = 0.2, .dphi = 0.2, .seed = 3, .flip_error = FlipError::relative});
  for (auto s : random_states(4, 10, 77)) {
    for (int step = 0; step < 20; ++step) {
      const double before = s.norm_or_trace();
      apply_problem_phase(s, h, 0.21);
      apply_drive(s, 0.4 - 0.05 * step, w, pn);
      EXPECT_NEAR(s.norm_or_trace(), before, 1e-12);
    }
  }
  InitOptions o;
  o.kind = InitKind::thermal;
  o.deviation = true;
  auto d = init_state(3, o);
  for (int step = 0; step < 20; ++step) {
    apply_problem_phase(d, h551(), 0.2);
    apply_drive(d, 0.3, default_drive_weights(3));
    EXPECT_NEAR(d.norm_or_trace(), 0.0, 1e-12);
  }
}

TEST(Invariants, MixtureAndAsMixed) {
  const auto s = random_states(2, 2, 8);
  const auto a = s[0].as_mixed();
  EXPECT_LT(density_distance(a, s[0].amplitudes() * s[0].amplitudes().adjoint()), 1e-16);
  const std::vector<QuantumState> parts{a, s[1]};
  const std::vector<double> wts{0.25, 0.75};
  const auto m = QuantumState::mixture(parts, wts);
  EXPECT_LT(density_distance(m, 0.25 * a.matrix() + 0.75 * s[1].matrix()), 1e-16);
  const std::vector<QuantumState> pure_parts{s[0]};
  EXPECT_THROW(QuantumState::mixture(pure_parts, std::vector<double>{1.0}), InvalidInput);
}
