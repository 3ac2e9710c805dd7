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
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "falqon/daqc.hpp"
#include "falqon/encoder.hpp"
#include "falqon/evolution.hpp"
#include "falqon/noise.hpp"
#include "falqon/pauli.hpp"
#include "falqon/state.hpp"
#include "falqon/zpoly.hpp"

namespace falqon {

/// A problem Hamiltonian with everything the loops derive from it.
struct Problem {
  ZPolynomial h;
  std::vector<double> drive_weights;
  std::vector<Index> solutions;
  std::optional<DecodingRule> rule;
  std::uint64_t n = 0;  // biprime, 0 if unknown

  std::vector<double> diagonal;
  PauliSum commutator;
  std::vector<TomographyGroup> groups;

  static Problem make(ZPolynomial h, std::vector<double> drive_weights, std::vector<Index> solutions = {},
                      std::optional<DecodingRule> rule = std::nullopt, std::uint64_t n = 0) {
    if (static_cast<int>(drive_weights.size()) != h.n_qubits()) throw InvalidInput("drive weight count differs from qubit count");
    for (double w : drive_weights) {
      if (!std::isfinite(w)) throw InvalidInput("drive weights must be finite");
    }
    Problem p;
    p.diagonal = zpoly_diagonal(h);
    p.commutator = commutator_with_drive(h, drive_weights);
    p.groups = tomography_groups(p.commutator);
    p.h = std::move(h);
    p.drive_weights = std::move(drive_weights);
    p.solutions = std::move(solutions);
    p.rule = std::move(rule);
    p.n = n;
    return p;
  }

  int n_qubits() const { return h.n_qubits(); }
};

struct Measurement {
  double energy = 0.0;
  double commutator = 0.0;
  double p_sol = 0.0;
  std::vector<double> probs;
};

/// Register evolved in lockstep for every RF ensemble member. Members share
/// the noise draws of each pulse; measurements are weight-averaged in member
/// order. With ideal RF there is one member.
class Register {
 public:
  Register(const QuantumState& initial, const RfModel& rf = {}, const DaqcSchedule* schedule = nullptr) : rf_(rf) {
    rf_.validate();
    for (const auto& m : rf_.members) {
      states_.push_back(initial);
      if (schedule != nullptr) props_.push_back(std::make_unique<DaqcPropagator>(*schedule, rf_.nu1_hz, m.scale));
    }
  }

  int n_qubits() const { return states_.front().n_qubits(); }
  const std::vector<QuantumState>& members() const { return states_; }

  void problem_layer(const Problem& p, double dt) {
    for (std::size_t k = 0; k < states_.size(); ++k) {
      if (props_.empty()) {
        apply_problem_phase(states_[k], p.diagonal, dt);
      } else {
        props_[k]->apply(states_[k]);
      }
    }
  }

  void drive_layer(double beta, std::span<const double> weights, PulseNoise& noise) {
    const auto draws = draw_pulse(noise, n_qubits());
    for (std::size_t k = 0; k < states_.size(); ++k) {
      apply_drive(states_[k], beta, weights, draws, rf_.members[k].scale);
    }
  }

  void rotate_all(const Eigen::Matrix2cd& u) {
    for (auto& s : states_) {
      for (int q = 0; q < s.n_qubits(); ++q) s.apply_1q(u, q);
    }
  }

  Measurement measure(const Problem& p, MeasurementMode mode, bool with_probs = true) const {
    Measurement out;
    std::vector<double> probs(dimension(n_qubits()), 0.0);
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const double w = rf_.members[k].weight;
      const auto& s = states_[k];
      out.energy += w * s.expectation_diagonal(p.diagonal);
      out.commutator += w * (mode == MeasurementMode::direct ? s.expectation(p.commutator)
                                                              : expectation_tomography(s, p.groups));
      const auto pk = s.diagonal_weights();
      for (std::size_t m = 0; m < probs.size(); ++m) probs[m] += w * pk[m];
    }
    for (Index m : p.solutions) out.p_sol += probs[m];
    if (with_probs) out.probs = std::move(probs);
    return out;
  }

 private:
  RfModel rf_;
  std::vector<QuantumState> states_;
  std::vector<std::unique_ptr<DaqcPropagator>> props_;
};

enum class LayerOrder { problem_first, drive_first };
enum class KickAxis { none, drive, y };

inline std::string to_string(LayerOrder o) { return o == LayerOrder::problem_first ? "problem_first" : "drive_first"; }

inline std::string to_string(KickAxis k) {
  switch (k) {
    case KickAxis::none: return "none";
    case KickAxis::drive: return "drive";
    case KickAxis::y: return "y";
  }
  return "?";
}

struct FalqonConfig {
  double c = 0.25;
  double dt = 0.2;
  int max_iters = 22;
  double beta0 = 0.0;
  KickAxis kick_axis = KickAxis::y;
  double kick_angle = kPi / 2;  // rad for "y", beta for "drive"
  double stall_threshold = 1e-12;
  MeasurementMode measurement = MeasurementMode::direct;
  LayerOrder layer_order = LayerOrder::problem_first;
  std::optional<double> stop_p_sol;
  bool stop_on_factors = false;
  bool record_probabilities = true;

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("c must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");
    if (max_iters < 0) throw InvalidInput("max_iters must be nonnegative");
    if (!std::isfinite(beta0)) throw InvalidInput("beta0 must be finite");
    if (!std::isfinite(kick_angle)) throw InvalidInput("kick angle must be finite");
    if (!(stall_threshold >= 0.0)) throw InvalidInput("stall threshold must be nonnegative");
    if (stop_p_sol && !(*stop_p_sol > 0.0 && *stop_p_sol <= 1.0)) throw InvalidInput("stop_p_sol must lie in (0, 1]");
  }
};

struct TrajectoryRow {
  int iter = 0;
  double beta = 0.0;
  double energy = 0.0;
  double p_sol = 0.0;
  double commutator = 0.0;
  std::vector<double> probs;
};

struct TrajectoryRecord {
  std::string algorithm;
  int n_qubits = 0;
  double angle_weight = 0.5;  // drive weight of qubit 1, for the degree column
  std::vector<TrajectoryRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> warnings;

  /// Net rotation of qubit 1 in degrees, 2 beta w.
  double beta_degrees(std::size_t row) const { return 2.0 * rows.at(row).beta * angle_weight * 180.0 / kPi; }
};

/// The two most probable basis states, ties broken by lower index.
inline std::pair<Index, Index> top_two(const std::vector<double>& probs) {
  if (probs.size() < 2) throw InvalidInput("need at least two basis states");
  std::vector<Index> idx(probs.size());
  for (Index m = 0; m < idx.size(); ++m) idx[m] = m;
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return probs[a] > probs[b]; });
  return {idx[0], idx[1]};
}

/// True if both of the two most probable states decode to a factorization.
inline bool top_two_factor(const Problem& p, const std::vector<double>& probs) {
  if (!p.rule || p.n == 0 || probs.size() < 2) return false;
  const auto [a, b] = top_two(probs);
  for (Index m : {a, b}) {
    const auto [x, y] = decode_factors(m, *p.rule);
    if (x * y != p.n) return false;
  }
  return true;
}

/// One feedback iteration: U_p(dt) then U_d(beta_next) (or the reverse when
/// configured), then measurement.
inline Measurement falqon_step(Register& reg, const Problem& p, double beta_next, const FalqonConfig& cfg,
                               PulseNoise& noise) {
  if (cfg.layer_order == LayerOrder::problem_first) {
    reg.problem_layer(p, cfg.dt);
    reg.drive_layer(beta_next, p.drive_weights, noise);
  } else {
    reg.drive_layer(beta_next, p.drive_weights, noise);
    reg.problem_layer(p, cfg.dt);
  }
  return reg.measure(p, cfg.measurement, cfg.record_probabilities);
}

inline Measurement falqon_step(QuantumState& state, const Problem& p, double beta_next, const FalqonConfig& cfg,
                               PulseNoise& noise) {
  Register reg(state);
  auto m = falqon_step(reg, p, beta_next, cfg, noise);
  state = reg.members().front();
  return m;
}

/// Runs the loop beta_{j+1} = c <C>_j. Row 0 is the first layer with beta_0;
/// rows 1..max_iters follow. A stall (|<C>_0| below threshold) triggers the
/// configured kick once.
inline TrajectoryRecord run_falqon(const Problem& p, const QuantumState& initial, const FalqonConfig& cfg,
                                   const NoiseModel& noise_model = {}, const RfModel& rf = {},
                                   const DaqcSchedule* schedule = nullptr) {
  cfg.validate();
  if (initial.n_qubits() != p.n_qubits()) throw InvalidInput("state and Hamiltonian qubit counts differ");
  PulseNoise noise(noise_model);
  Register reg(initial, rf, schedule);

  TrajectoryRecord rec;
  rec.algorithm = "falqon";
  rec.n_qubits = p.n_qubits();
  rec.angle_weight = p.drive_weights.empty() ? 0.0 : p.drive_weights.front();

  double beta = cfg.beta0;
  for (int j = 0; j <= cfg.max_iters; ++j) {
    const Measurement m = falqon_step(reg, p, beta, cfg, noise);
    rec.rows.push_back({j, beta, m.energy, m.p_sol, m.commutator, m.probs});
    double next = cfg.c * m.commutator;
    if (j == 0 && std::abs(m.commutator) < cfg.stall_threshold) {
      switch (cfg.kick_axis) {
        case KickAxis::none:
          rec.warnings.push_back("stalled at iteration 0 with no kick configured");
          break;
        case KickAxis::drive:
          next = cfg.kick_angle;
          rec.metadata.emplace_back("seed_kick", "drive beta applied at iteration 1");
          break;
        case KickAxis::y:
          reg.rotate_all(rotation_y(cfg.kick_angle));
          next = cfg.c * reg.measure(p, cfg.measurement, false).commutator;
          rec.metadata.emplace_back("seed_kick", "global y rotation applied after iteration 0");
          break;
      }
    }
    if (cfg.stop_p_sol && m.p_sol >= *cfg.stop_p_sol) break;
    if (cfg.stop_on_factors && j > 0 && top_two_factor(p, reg.measure(p, cfg.measurement, true).probs)) break;
    beta = next;
  }
  return rec;
}

}  // namespace falqon
