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
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "falqon/evolution.hpp"
#include "falqon/noise.hpp"
#include "falqon/pauli.hpp"
#include "falqon/state.hpp"
#include "falqon/zpoly.hpp"

namespace falqon {

/// Always-on register couplings: scalar J_ij (Hz) and resonance offsets (Hz).
struct Couplings {
  Eigen::MatrixXd j_hz;
  std::vector<double> offsets_hz;
  bool offsets_enabled = false;

  int n_qubits() const { return static_cast<int>(j_hz.rows()); }

  static Couplings from_pairs(int n_qubits, const std::map<std::pair<int, int>, double>& j) {
    Couplings c;
    c.j_hz = Eigen::MatrixXd::Zero(n_qubits, n_qubits);
    c.offsets_hz.assign(static_cast<std::size_t>(n_qubits), 0.0);
    for (const auto& [pair, v] : j) {
      const auto [a, b] = pair;
      if (a < 0 || b < 0 || a >= n_qubits || b >= n_qubits || a == b) throw InvalidInput("bad coupling pair");
      c.j_hz(a, b) = v;
      c.j_hz(b, a) = v;
    }
    return c;
  }

  /// Three-qubit couplings used when none are supplied.
  static Couplings synthetic3() { return from_pairs(3, {{{0, 1}, 69.7}, {{0, 2}, -128.3}, {{1, 2}, 47.6}}); }

  void validate() const {
    const int n = n_qubits();
    if (j_hz.cols() != n) throw InvalidInput("coupling matrix must be square");
    if ((j_hz - j_hz.transpose()).cwiseAbs().maxCoeff() > 0.0) throw InvalidInput("coupling matrix must be symmetric");
    if (!j_hz.allFinite()) throw InvalidInput("coupling matrix must be finite");
    if (static_cast<int>(offsets_hz.size()) != n) throw InvalidInput("offset count differs from qubit count");
  }

  /// sum_{i<j} (pi J_ij / 2) z_i z_j + sum_i pi nu_i z_i (offsets only if enabled), in rad/s.
  ZPolynomial free_hamiltonian() const {
    const int n = n_qubits();
    ZPolynomial h(n);
    for (int i = 0; i < n; ++i) {
      for (int k = i + 1; k < n; ++k) {
        if (j_hz(i, k) != 0.0) h.add(qubit_mask(n, i) | qubit_mask(n, k), kPi * j_hz(i, k) / 2);
      }
      if (offsets_enabled && offsets_hz[static_cast<std::size_t>(i)] != 0.0) {
        h.add(qubit_mask(n, i), kPi * offsets_hz[static_cast<std::size_t>(i)]);
      }
    }
    return h;
  }
};

struct DaqcSegment {
  Mask pulses_before = 0;  // qubits receiving a pi pulse before this segment
  double duration_s = 0.0;
};

struct DaqcSchedule {
  int n_qubits = 0;
  Couplings couplings;
  std::vector<DaqcSegment> segments;
  Mask closing_pulses = 0;

  double total_time() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration_s;
    return t;
  }

  int pulse_count() const {
    int c = std::popcount(closing_pulses);
    for (const auto& s : segments) c += std::popcount(s.pulses_before);
    return c;
  }
};

/// Solves sum_P s_i(P) s_j(P) (pi J_ij / 2) t_P = a_ij dt over the 2^(n-1)
/// refocusing patterns P (qubit 1 never flipped). The pair characters are
/// orthogonal over that set, so t_P = 2^-(n-1) sum_ij s_i s_j x_ij, shifted by
/// a common constant to make every duration nonnegative. Segments follow a
/// Gray-code order so consecutive patterns differ by one pulse.
inline DaqcSchedule daqc_schedule(const Couplings& couplings, const ZPolynomial& target, double dt) {
  couplings.validate();
  const int n = target.n_qubits();
  if (couplings.n_qubits() != n) throw InvalidInput("coupling matrix and target qubit counts differ");
  if (!std::isfinite(dt)) throw InvalidInput("dt must be finite");

  DaqcSchedule sched;
  sched.n_qubits = n;
  sched.couplings = couplings;

  struct Pair {
    int i, k;
    double x;  // required (pi J / 2) t sum, in units of seconds
  };
  std::vector<Pair> pairs;
  std::ostringstream missing;
  for (const auto& [mask, coeff] : target.terms()) {
    const int deg = std::popcount(mask);
    if (deg == 0) continue;
    if (deg != 2) throw InvalidInput("DAQC targets must contain only two-body ZZ terms");
    const auto labels = target.labels(mask);
    const int i = labels[0] - 1;
    const int k = labels[1] - 1;
    const double j = couplings.j_hz(i, k);
    if (j == 0.0) {
      missing << " (" << i + 1 << "," << k + 1 << ")";
      continue;
    }
    pairs.push_back({i, k, coeff * dt / (kPi * j / 2)});
  }
  if (!missing.str().empty()) throw SolverFailure("no coupling available for pair(s)" + missing.str());
  if (pairs.empty() || n < 2) return sched;

  const Index patterns = dimension(n - 1);
  auto pattern_mask = [&](Index g) {
    Mask m = 0;
    for (int r = 0; r < n - 1; ++r) {
      if ((g >> r) & 1u) m |= qubit_mask(n, r + 1);
    }
    return m;
  };
  std::vector<double> t(patterns, 0.0);
  double t_min = 0.0;
  double t_scale = 0.0;
  for (Index k = 0; k < patterns; ++k) {
    const Index g = k ^ (k >> 1);
    const Mask p = pattern_mask(g);
    double v = 0.0;
    for (const auto& pr : pairs) {
      const bool flip = ((p & qubit_mask(n, pr.i)) != 0) != ((p & qubit_mask(n, pr.k)) != 0);
      v += flip ? -pr.x : pr.x;
    }
    t[k] = v / static_cast<double>(patterns);
    t_min = std::min(t_min, t[k]);
    t_scale = std::max(t_scale, std::abs(t[k]));
  }
  Mask current = 0;
  for (Index k = 0; k < patterns; ++k) {
    double d = t[k] - t_min;
    if (d <= 1e-15 * t_scale) continue;
    const Mask p = pattern_mask(k ^ (k >> 1));
    sched.segments.push_back({p ^ current, d});
    current = p;
  }
  sched.closing_pulses = current;
  return sched;
}

/// exp(-i h t) for a Hermitian matrix.
inline DenseMatrix expm_hermitian(const DenseMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
  if (es.info() != Eigen::Success) throw SolverFailure("Hermitian eigensolver failed");
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Runs a schedule for one RF ensemble member. Ideal pulses (infinite nu1)
/// are instantaneous x rotations by pi * scale; finite pulses last
/// 1 / (2 nu1) with the couplings active.
class DaqcPropagator {
 public:
  DaqcPropagator(const DaqcSchedule& schedule, double nu1_hz, double scale)
      : schedule_(schedule), nu1_(nu1_hz), scale_(scale) {
    free_diag_ = zpoly_diagonal(schedule.couplings.free_hamiltonian());
    if (!std::isinf(nu1_)) {
      check_dense_size(schedule.n_qubits);
      free_dense_ = dense(schedule.couplings.free_hamiltonian());
    }
  }

  void apply(QuantumState& state) {
    if (state.n_qubits() != schedule_.n_qubits) throw InvalidInput("schedule qubit count differs from state");
    for (const auto& seg : schedule_.segments) {
      pulse(state, seg.pulses_before);
      apply_problem_phase(state, free_diag_, seg.duration_s);
    }
    pulse(state, schedule_.closing_pulses);
  }

 private:
  void pulse(QuantumState& state, Mask qubits) {
    if (qubits == 0) return;
    const int n = schedule_.n_qubits;
    if (std::isinf(nu1_)) {
      const Eigen::Matrix2cd r = rotation_x(kPi * scale_);
      for (int q = 0; q < n; ++q) {
        if (qubits & qubit_mask(n, q)) state.apply_1q(r, q);
      }
      return;
    }
    auto it = cache_.find(qubits);
    if (it == cache_.end()) {
      DenseMatrix h = free_dense_;
      for (int q = 0; q < n; ++q) {
        if (qubits & qubit_mask(n, q)) h += (kPi * nu1_ * scale_) * embed(pauli_x(), n, q);
      }
      it = cache_.emplace(qubits, expm_hermitian(h, 1.0 / (2.0 * nu1_))).first;
    }
    state.apply_unitary(it->second);
  }

  const DaqcSchedule& schedule_;
  double nu1_;
  double scale_;
  std::vector<double> free_diag_;
  DenseMatrix free_dense_;
  std::map<Mask, DenseMatrix> cache_;
};

/// Applies the schedule. A multi-member RF ensemble needs a mixed state and
/// returns the weight-averaged result, reduced in member order.
inline void apply_daqc(QuantumState& state, const DaqcSchedule& schedule, const RfModel& rf = {}) {
  rf.validate();
  if (rf.members.size() == 1) {
    DaqcPropagator(schedule, rf.nu1_hz, rf.members[0].scale).apply(state);
    return;
  }
  if (state.backend() != Backend::mixed) throw InvalidInput("an RF ensemble needs the mixed backend");
  std::vector<QuantumState> out;
  std::vector<double> weights;
  for (const auto& m : rf.members) {
    QuantumState copy = state;
    DaqcPropagator(schedule, rf.nu1_hz, m.scale).apply(copy);
    out.push_back(std::move(copy));
    weights.push_back(m.weight);
  }
  state = QuantumState::mixture(out, weights);
}

/// Problem layer realized either exactly or through a DAQC schedule.
inline void apply_problem_phase(QuantumState& state, const ZPolynomial& h, double dt, const DaqcSchedule* schedule,
                                const RfModel& rf = {}) {
  if (schedule == nullptr) {
    apply_problem_phase(state, h, dt);
    return;
  }
  if (schedule->n_qubits != state.n_qubits()) throw InvalidInput("schedule qubit count differs from state");
  apply_daqc(state, *schedule, rf);
}

/// Unitary of a schedule for one member, for verification (n <= 12).
inline DenseMatrix daqc_unitary(const DaqcSchedule& schedule, double nu1_hz = std::numeric_limits<double>::infinity(),
                                double scale = 1.0) {
  check_dense_size(schedule.n_qubits);
  const auto dim = static_cast<Eigen::Index>(dimension(schedule.n_qubits));
  DenseMatrix u(dim, dim);
  DaqcPropagator prop(schedule, nu1_hz, scale);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e(c) = 1.0;
    QuantumState s = QuantumState::pure(e);
    prop.apply(s);
    u.col(c) = s.amplitudes();
  }
  return u;
}

/// |Tr(U^dagger V)|^2 / d^2.
inline double gate_fidelity(const DenseMatrix& u, const DenseMatrix& v) {
  const double d = static_cast<double>(u.rows());
  return std::norm((u.adjoint() * v).trace()) / (d * d);
}

}  // namespace falqon
