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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "falqon/core.hpp"
#include "falqon/pauli.hpp"
#include "falqon/zpoly.hpp"

namespace falqon {

enum class Backend { pure, mixed };

/// Register state: a state vector, a density matrix, or (deviation mode) the
/// traceless deviation D of an NMR-style state. In deviation mode every
/// reported quantity is a linear functional of I/2^n + kappa D.
class QuantumState {
 public:
  static constexpr double kTol = 1e-12;

  static QuantumState pure(Eigen::VectorXcd amplitudes) {
    QuantumState s;
    s.n_ = register_size(amplitudes.size());
    const double norm = amplitudes.norm();
    if (std::abs(norm - 1.0) > 1e-10) throw InvalidInput("state vector is not normalized");
    s.backend_ = Backend::pure;
    s.psi_ = std::move(amplitudes);
    return s;
  }

  static QuantumState mixed(Eigen::MatrixXcd rho) {
    QuantumState s;
    s.n_ = square_register_size(rho);
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw InvalidInput("density matrix is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10) throw InvalidInput("density matrix trace is not 1");
    s.backend_ = Backend::mixed;
    s.rho_ = std::move(rho);
    return s;
  }

  static QuantumState deviation(Eigen::MatrixXcd delta, double kappa) {
    QuantumState s;
    s.n_ = square_register_size(delta);
    if ((delta - delta.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw InvalidInput("deviation is not Hermitian");
    if (std::abs(delta.trace()) > 1e-10) throw InvalidInput("deviation is not traceless");
    if (!std::isfinite(kappa)) throw InvalidInput("kappa must be finite");
    s.backend_ = Backend::mixed;
    s.deviation_ = true;
    s.kappa_ = kappa;
    s.rho_ = std::move(delta);
    return s;
  }

  int n_qubits() const { return n_; }
  Index dim() const { return dimension(n_); }
  Backend backend() const { return backend_; }
  bool deviation_mode() const { return deviation_; }
  double kappa() const { return kappa_; }
  const Eigen::VectorXcd& amplitudes() const { return psi_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }

  /// Norm (pure) or trace (mixed; 0 for a deviation).
  double norm_or_trace() const { return backend_ == Backend::pure ? psi_.norm() : rho_.trace().real(); }

  /// Population of each basis state. Deviation mode reports 1/2^n + kappa D_mm,
  /// which may be negative.
  std::vector<double> diagonal_weights() const {
    std::vector<double> w(dim());
    for (Index m = 0; m < dim(); ++m) {
      const auto i = static_cast<Eigen::Index>(m);
      if (backend_ == Backend::pure) {
        w[m] = std::norm(psi_(i));
      } else if (deviation_) {
        w[m] = 1.0 / static_cast<double>(dim()) + kappa_ * rho_(i, i).real();
      } else {
        w[m] = rho_(i, i).real();
      }
    }
    return w;
  }

  /// Applies a 2x2 unitary to one qubit.
  void apply_1q(const Eigen::Matrix2cd& u, int qubit) {
    check_qubit(qubit);
    const Index b = qubit_mask(n_, qubit);
    if (backend_ == Backend::pure) {
      for (Index m = 0; m < dim(); ++m) {
        if (m & b) continue;
        const auto i0 = static_cast<Eigen::Index>(m);
        const auto i1 = static_cast<Eigen::Index>(m | b);
        const Complex a0 = psi_(i0);
        const Complex a1 = psi_(i1);
        psi_(i0) = u(0, 0) * a0 + u(0, 1) * a1;
        psi_(i1) = u(1, 0) * a0 + u(1, 1) * a1;
      }
      return;
    }
    const auto d = static_cast<Eigen::Index>(dim());
    // rho <- U rho
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Index m = 0; m < dim(); ++m) {
        if (m & b) continue;
        const auto i0 = static_cast<Eigen::Index>(m);
        const auto i1 = static_cast<Eigen::Index>(m | b);
        const Complex a0 = rho_(i0, c);
        const Complex a1 = rho_(i1, c);
        rho_(i0, c) = u(0, 0) * a0 + u(0, 1) * a1;
        rho_(i1, c) = u(1, 0) * a0 + u(1, 1) * a1;
      }
    }
    // rho <- rho U^dagger
    for (Index m = 0; m < dim(); ++m) {
      if (m & b) continue;
      const auto c0 = static_cast<Eigen::Index>(m);
      const auto c1 = static_cast<Eigen::Index>(m | b);
      for (Eigen::Index r = 0; r < d; ++r) {
        const Complex a0 = rho_(r, c0);
        const Complex a1 = rho_(r, c1);
        rho_(r, c0) = a0 * std::conj(u(0, 0)) + a1 * std::conj(u(0, 1));
        rho_(r, c1) = a0 * std::conj(u(1, 0)) + a1 * std::conj(u(1, 1));
      }
    }
  }

  /// Multiplies basis state m by phases[m].
  void apply_diagonal(std::span<const Complex> phases) {
    if (phases.size() != dim()) throw InvalidInput("phase vector size mismatch");
    if (backend_ == Backend::pure) {
      for (Index m = 0; m < dim(); ++m) psi_(static_cast<Eigen::Index>(m)) *= phases[m];
      return;
    }
    const auto d = static_cast<Eigen::Index>(dim());
    for (Eigen::Index c = 0; c < d; ++c) {
      const Complex pc = std::conj(phases[static_cast<std::size_t>(c)]);
      for (Eigen::Index r = 0; r < d; ++r) rho_(r, c) *= phases[static_cast<std::size_t>(r)] * pc;
    }
  }

  void apply_unitary(const Eigen::MatrixXcd& u) {
    if (u.rows() != static_cast<Eigen::Index>(dim()) || u.cols() != u.rows()) {
      throw InvalidInput("unitary dimension mismatch");
    }
    if (backend_ == Backend::pure) {
      psi_ = u * psi_;
    } else {
      rho_ = u * rho_ * u.adjoint();
    }
  }

  /// Tr(H rho) using only the diagonal.
  double expectation(const ZPolynomial& h) const {
    if (h.n_qubits() != n_) throw InvalidInput("Hamiltonian and state qubit counts differ");
    const auto w = diagonal_weights();
    double e = 0.0;
    for (Index m = 0; m < dim(); ++m) e += h.value_at(m) * w[m];
    return e;
  }

  /// Same as expectation(h) but with a precomputed diagonal.
  double expectation_diagonal(std::span<const double> diag) const {
    if (diag.size() != dim()) throw InvalidInput("diagonal size mismatch");
    const auto w = diagonal_weights();
    double e = 0.0;
    for (Index m = 0; m < dim(); ++m) e += diag[m] * w[m];
    return e;
  }

  /// Direct contraction Tr(P rho) for a real Pauli sum. Returns the complex
  /// value so callers can check that the imaginary part vanishes.
  Complex expectation_complex(const PauliSum& c) const {
    if (c.n_qubits() != n_) throw InvalidInput("operator and state qubit counts differ");
    Complex total = 0.0;
    for (const auto& t : c.terms()) {
      const Mask f = t.flips();
      Complex acc = 0.0;
      if (backend_ == Backend::pure) {
        for (Index m = 0; m < dim(); ++m) {
          acc += std::conj(psi_(static_cast<Eigen::Index>(m ^ f))) * pauli_phase(t, m) * psi_(static_cast<Eigen::Index>(m));
        }
      } else {
        // Tr(P rho) = sum_m phase(m) rho(m, m ^ f)
        for (Index m = 0; m < dim(); ++m) {
          acc += pauli_phase(t, m) * rho_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m ^ f));
        }
        if (deviation_) {
          acc *= kappa_;
          if (t.x == 0 && t.y == 0 && t.z == 0) acc += 1.0;
        }
      }
      total += t.coeff * acc;
    }
    return total;
  }

  double expectation(const PauliSum& c) const { return expectation_complex(c).real(); }

  /// |<phi|psi>|^2 for pure states, <phi|rho|phi> for mixed ones.
  double fidelity_with(const Eigen::VectorXcd& target) const {
    if (target.size() != static_cast<Eigen::Index>(dim())) throw InvalidInput("fidelity dimension mismatch");
    if (backend_ == Backend::pure) return std::norm(target.dot(psi_));
    if (deviation_) throw InvalidInput("fidelity undefined for a deviation state");
    return (target.adjoint() * rho_ * target)(0, 0).real();
  }

  /// Mixture sum_k w_k states_k of mixed states with a common layout.
  static QuantumState mixture(std::span<const QuantumState> states, std::span<const double> weights) {
    if (states.empty() || states.size() != weights.size()) throw InvalidInput("mixture needs matching states and weights");
    QuantumState out = states[0];
    if (out.backend_ != Backend::mixed) throw InvalidInput("mixture needs mixed states");
    out.rho_.setZero();
    for (std::size_t k = 0; k < states.size(); ++k) {
      if (states[k].backend_ != Backend::mixed || states[k].deviation_ != out.deviation_ || states[k].n_ != out.n_) {
        throw InvalidInput("mixture members differ in layout");
      }
      out.rho_ += weights[k] * states[k].rho_;
    }
    return out;
  }

  /// Density matrix (or deviation) of a pure state; identity for mixed ones.
  QuantumState as_mixed() const {
    if (backend_ == Backend::mixed) return *this;
    QuantumState s;
    s.n_ = n_;
    s.backend_ = Backend::mixed;
    s.rho_ = psi_ * psi_.adjoint();
    return s;
  }

 private:
  static int register_size(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim || dim == 0) throw InvalidInput("state dimension is not a power of two");
    return n;
  }

  static int square_register_size(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw InvalidInput("density matrix is not square");
    return register_size(m.rows());
  }

  void check_qubit(int q) const {
    if (q < 0 || q >= n_) throw InvalidInput("qubit index out of range");
  }

  int n_ = 0;
  Backend backend_ = Backend::pure;
  bool deviation_ = false;
  double kappa_ = 1.0;
  Eigen::VectorXcd psi_;
  Eigen::MatrixXcd rho_;
};

// ---------------------------------------------------------------------------

enum class InitKind { zero, uniform, thermal, explicit_amplitudes };

struct InitOptions {
  InitKind kind = InitKind::uniform;
  double epsilon = 1e-5;                      // thermal polarization
  bool deviation = false;                     // thermal: keep only the deviation
  std::optional<double> kappa;                // deviation scale, default 1/n
  bool rotate_y90 = true;                     // thermal: apply the global 90_y pulse
  Eigen::VectorXcd amplitudes;                // explicit kind
};

inline std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::zero: return "zero";
    case InitKind::uniform: return "uniform";
    case InitKind::thermal: return "thermal";
    case InitKind::explicit_amplitudes: return "explicit";
  }
  return "?";
}

/// Initial register states.
///
/// thermal: (I + eps sum_i z_i) / 2^n, turned into transverse magnetization
/// by exp(-i pi/4 sum_i y_i). The deviation form stores sum_i z_i / 2^n
/// (eps is unobservable on the arbitrary NMR scale) and reports
/// I/2^n + kappa D with kappa = 1/n by default, the largest positive choice.
inline QuantumState init_state(int n_qubits, const InitOptions& opt = {}) {
  if (n_qubits < 1 || n_qubits > 24) throw InvalidInput("qubit count must be in 1..24");
  const auto dim = static_cast<Eigen::Index>(dimension(n_qubits));
  switch (opt.kind) {
    case InitKind::zero: {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
      v(0) = 1.0;
      return QuantumState::pure(std::move(v));
    }
    case InitKind::uniform:
      return QuantumState::pure(Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
    case InitKind::explicit_amplitudes:
      if (opt.amplitudes.size() != dim) throw InvalidInput("explicit amplitudes have the wrong length");
      return QuantumState::pure(opt.amplitudes);
    case InitKind::thermal: {
      if (!(opt.epsilon > 0.0 && opt.epsilon <= 1.0)) throw InvalidInput("thermal epsilon must lie in (0, 1]");
      if (n_qubits > kDenseGuard) throw SizeGuard("mixed states limited to 12 qubits");
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        double zsum = 0.0;
        for (int q = 0; q < n_qubits; ++q) zsum += qubit_value(static_cast<Index>(i), n_qubits, q) ? -1.0 : 1.0;
        m(i, i) = opt.deviation ? zsum / static_cast<double>(dim)
                                : (1.0 + opt.epsilon * zsum) / static_cast<double>(dim);
      }
      QuantumState s = opt.deviation ? QuantumState::deviation(std::move(m), opt.kappa.value_or(1.0 / n_qubits))
                                     : QuantumState::mixed(std::move(m));
      if (opt.rotate_y90) {
        for (int q = 0; q < n_qubits; ++q) s.apply_1q(rotation_y(kPi / 2), q);
      }
      return s;
    }
  }
  throw InvalidInput("unknown init kind");
}

struct Populations {
  std::vector<double> probs;
  double p_sol = 0.0;
};

inline Populations basis_probabilities(const QuantumState& s, std::span<const Index> solution_states) {
  Populations out{s.diagonal_weights(), 0.0};
  for (Index m : solution_states) {
    if (m >= out.probs.size()) throw InvalidInput("solution index out of range");
    out.p_sol += out.probs[m];
  }
  return out;
}

}  // namespace falqon
