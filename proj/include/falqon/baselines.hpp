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
#include <utility>
#include <vector>

#include "falqon/falqon.hpp"

namespace falqon {

/// Trotterized interpolation from H_init = -H_d to H_p.
struct RampSchedule {
  double dt = 0.2;
  std::vector<double> s;  // s_1..s_N

  static RampSchedule linear(int steps, double dt) {
    if (steps < 0) throw InvalidInput("ramp steps must be nonnegative");
    RampSchedule r;
    r.dt = dt;
    for (int j = 1; j <= steps; ++j) r.s.push_back(static_cast<double>(j) / steps);
    return r;
  }

  int steps() const { return static_cast<int>(s.size()); }

  void validate() const {
    if (!std::isfinite(dt)) throw InvalidInput("ramp dt must be finite");
    double prev = 0.0;
    for (double v : s) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("ramp values must lie in [0, 1]");
      if (v < prev) throw InvalidInput("ramp must be non-decreasing");
      prev = v;
    }
  }
};

struct QaoaSchedule {
  std::vector<std::pair<double, double>> layers;  // (gamma, beta)

  /// gamma_j = s_j dt, beta_j = -(1 - s_j) dt: the adiabatic ramp as angles.
  static QaoaSchedule linear_ramp(int layers, double dt) {
    if (layers < 1) throw InvalidInput("QAOA needs at least one layer");
    QaoaSchedule q;
    for (int j = 1; j <= layers; ++j) {
      const double s = static_cast<double>(j) / layers;
      q.layers.emplace_back(s * dt, -(1.0 - s) * dt);
    }
    return q;
  }

  void validate() const {
    if (layers.empty()) throw InvalidInput("QAOA needs at least one layer");
    for (const auto& [g, b] : layers) {
      if (!std::isfinite(g) || !std::isfinite(b)) throw InvalidInput("QAOA angles must be finite");
    }
  }
};

/// |+...+>, the ground state of -H_d for positive weights.
inline QuantumState plus_state(int n_qubits) {
  InitOptions o;
  o.kind = InitKind::uniform;
  return init_state(n_qubits, o);
}

namespace detail {

inline void log_row(TrajectoryRecord& rec, const Register& reg, const Problem& p, int j, double beta,
                    bool with_probs) {
  const auto m = reg.measure(p, MeasurementMode::direct, with_probs);
  rec.rows.push_back({j, beta, m.energy, m.p_sol, m.commutator, m.probs});
}

inline TrajectoryRecord start_record(const char* algorithm, const Problem& p) {
  TrajectoryRecord rec;
  rec.algorithm = algorithm;
  rec.n_qubits = p.n_qubits();
  rec.angle_weight = p.drive_weights.empty() ? 0.0 : p.drive_weights.front();
  rec.metadata.emplace_back("noise_injection", "drive rotations only");
  return rec;
}

}  // namespace detail

/// Each step applies exp(-i s_j H_p dt) then exp(-i (1 - s_j) H_init dt), with
/// H_init = -H_d. Row 0 is the initial state; row j follows step j. The beta
/// column holds the applied drive amplitude -(1 - s_j) dt.
inline TrajectoryRecord run_adiabatic(const Problem& p, const RampSchedule& ramp, const NoiseModel& noise_model = {},
                                      const QuantumState* initial = nullptr, bool record_probabilities = true) {
  ramp.validate();
  PulseNoise noise(noise_model);
  Register reg(initial ? *initial : plus_state(p.n_qubits()));
  auto rec = detail::start_record("adiabatic", p);
  rec.metadata.emplace_back("initial_hamiltonian", "-H_d");
  detail::log_row(rec, reg, p, 0, 0.0, record_probabilities);
  for (int j = 0; j < ramp.steps(); ++j) {
    const double s = ramp.s[static_cast<std::size_t>(j)];
    const double beta = -(1.0 - s) * ramp.dt;
    reg.problem_layer(p, s * ramp.dt);
    reg.drive_layer(beta, p.drive_weights, noise);
    detail::log_row(rec, reg, p, j + 1, beta, record_probabilities);
  }
  return rec;
}

/// From the uniform superposition, each layer applies exp(-i gamma H_p) then
/// exp(-i beta H_d).
inline TrajectoryRecord run_qaoa(const Problem& p, const QaoaSchedule& sched, const NoiseModel& noise_model = {},
                                 bool record_probabilities = true) {
  sched.validate();
  PulseNoise noise(noise_model);
  Register reg(plus_state(p.n_qubits()));
  auto rec = detail::start_record("qaoa", p);
  detail::log_row(rec, reg, p, 0, 0.0, record_probabilities);
  int j = 0;
  for (const auto& [gamma, beta] : sched.layers) {
    reg.problem_layer(p, gamma);
    reg.drive_layer(beta, p.drive_weights, noise);
    detail::log_row(rec, reg, p, ++j, beta, record_probabilities);
  }
  return rec;
}

}  // namespace falqon
