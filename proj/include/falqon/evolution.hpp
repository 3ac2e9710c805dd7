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

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "falqon/noise.hpp"
#include "falqon/pauli.hpp"
#include "falqon/state.hpp"
#include "falqon/zpoly.hpp"

namespace falqon {

/// exp(-i e_m dt) on every basis state.
inline void apply_problem_phase(QuantumState& state, std::span<const double> diag, double dt) {
  if (!std::isfinite(dt)) throw InvalidInput("dt must be finite");
  if (dt == 0.0) return;
  std::vector<Complex> phases(diag.size());
  for (std::size_t m = 0; m < diag.size(); ++m) phases[m] = std::polar(1.0, -diag[m] * dt);
  state.apply_diagonal(phases);
}

inline void apply_problem_phase(QuantumState& state, const ZPolynomial& h, double dt) {
  if (h.n_qubits() != state.n_qubits()) throw InvalidInput("Hamiltonian and state qubit counts differ");
  const auto diag = zpoly_diagonal(h);
  apply_problem_phase(state, diag, dt);
}

/// exp(-i a (cos(phi) x + sin(phi) y)).
inline Eigen::Matrix2cd tilted_rotation(double a, double phi) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  Eigen::Matrix2cd u;
  u << c, Complex(0, -s) * std::polar(1.0, -phi), Complex(0, -s) * std::polar(1.0, phi), c;
  return u;
}

/// Product drive pulse prod_i exp(-i (beta + a_i)(1 + g_i) w_i scale sigma_i'),
/// with the flip errors a_i, g_i and the axis tilt phi_i taken from the
/// per-qubit draws and `scale` an RF amplitude factor.
inline void apply_drive(QuantumState& state, double beta, std::span<const double> weights,
                        std::span<const PulseNoise::Draw> draws, double scale = 1.0) {
  if (!std::isfinite(beta)) throw InvalidInput("beta must be finite");
  if (static_cast<int>(weights.size()) != state.n_qubits()) throw InvalidInput("drive weight count differs from qubit count");
  if (draws.size() != weights.size()) throw InvalidInput("one noise draw per qubit required");
  for (int q = 0; q < state.n_qubits(); ++q) {
    const auto& d = draws[static_cast<std::size_t>(q)];
    const double a = (beta + d.offset) * (1.0 + d.gain) * weights[static_cast<std::size_t>(q)] * scale;
    if (a == 0.0) continue;
    state.apply_1q(tilted_rotation(a, d.phase), q);
  }
}

/// One draw per qubit, in qubit order, for a single drive pulse.
inline std::vector<PulseNoise::Draw> draw_pulse(PulseNoise& noise, int n_qubits) {
  std::vector<PulseNoise::Draw> out(static_cast<std::size_t>(n_qubits));
  for (auto& d : out) d = noise.next();
  return out;
}

inline void apply_drive(QuantumState& state, double beta, std::span<const double> weights, PulseNoise& noise,
                        double scale = 1.0) {
  const auto draws = draw_pulse(noise, state.n_qubits());
  apply_drive(state, beta, weights, draws, scale);
}

inline void apply_drive(QuantumState& state, double beta, std::span<const double> weights) {
  PulseNoise quiet;
  apply_drive(state, beta, weights, quiet);
}

inline double expectation_energy(const QuantumState& state, const ZPolynomial& h) { return state.expectation(h); }

enum class MeasurementMode { direct, tomography };

inline std::string to_string(MeasurementMode m) { return m == MeasurementMode::direct ? "direct" : "tomography"; }

/// Tomography read-out: rotate a copy by R_k^dagger, read populations, contract
/// with the diagonal of D_k.
inline double expectation_tomography(const QuantumState& state, const std::vector<TomographyGroup>& groups) {
  double total = 0.0;
  const Eigen::Matrix2cd r_dag = rotation_x(-kPi / 2);
  for (const auto& g : groups) {
    if (g.diagonal.n_qubits() != state.n_qubits()) throw InvalidInput("tomography group qubit count mismatch");
    QuantumState copy = state;
    copy.apply_1q(r_dag, g.qubit);
    total += copy.expectation(g.diagonal);
  }
  return total;
}

inline double expectation_commutator(const QuantumState& state, const PauliSum& c, MeasurementMode mode) {
  if (mode == MeasurementMode::direct) return state.expectation(c);
  return expectation_tomography(state, tomography_groups(c));
}

}  // namespace falqon
