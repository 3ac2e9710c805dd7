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
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "falqon/core.hpp"

namespace falqon {

/// How a flip-error draw u enters a drive rotation of nominal amplitude beta:
/// relative gives beta (1 + u), additive gives beta + u.
enum class FlipError { relative, additive };

inline std::string to_string(FlipError f) { return f == FlipError::relative ? "relative" : "additive"; }

inline FlipError parse_flip_error(const std::string& s) {
  if (s == "relative") return FlipError::relative;
  if (s == "additive") return FlipError::additive;
  throw InvalidInput("unknown flip error model '" + s + "' (expected relative or additive)");
}

/// Control errors: uniform half-widths on flip angle and pulse phase.
struct NoiseModel {
  double dtheta = 0.0;  // relative amplitude, or rad of beta for the additive model
  double dphi = 0.0;    // rad
  std::uint64_t seed = 0;
  FlipError flip_error = FlipError::relative;

  bool active() const { return dtheta != 0.0 || dphi != 0.0; }

  void validate() const {
    if (!(dtheta >= 0.0) || !(dphi >= 0.0) || !std::isfinite(dtheta) || !std::isfinite(dphi)) {
      throw InvalidInput("noise amplitudes must be finite and nonnegative");
    }
  }
};

/// Per-pulse error stream. Each drive pulse draws, for every qubit, a flip
/// error from U(-dtheta, dtheta) and then a phase error from U(-dphi, dphi).
/// Zero amplitudes consume no draws.
class PulseNoise {
 public:
  PulseNoise() : PulseNoise(NoiseModel{}) {}
  explicit PulseNoise(const NoiseModel& model) : model_(model), rng_(model.seed) { model.validate(); }

  const NoiseModel& model() const { return model_; }

  struct Draw {
    double offset = 0.0;  // added to beta
    double gain = 0.0;    // beta scaled by (1 + gain)
    double phase = 0.0;
  };

  Draw next() {
    Draw d;
    if (model_.dtheta != 0.0) {
      const double u = model_.dtheta * (2.0 * unit() - 1.0);
      (model_.flip_error == FlipError::relative ? d.gain : d.offset) = u;
    }
    if (model_.dphi != 0.0) d.phase = model_.dphi * (2.0 * unit() - 1.0);
    return d;
  }

 private:
  // 53-bit uniform in [0, 1); fixed arithmetic so streams match across
  // standard libraries.
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  NoiseModel model_;
  std::mt19937_64 rng_;
};

/// RF amplitude and inhomogeneity: an ensemble of amplitude scales.
struct RfMember {
  double scale = 1.0;
  double weight = 1.0;
};

struct RfModel {
  double nu1_hz = std::numeric_limits<double>::infinity();  // inf = ideal, instantaneous pulses
  double rfi = 0.0;
  std::vector<RfMember> members{{1.0, 1.0}};

  bool ideal_pulses() const { return std::isinf(nu1_hz); }

  /// Symmetric grid over [1 - rfi, 1 + rfi] with uniform weights.
  static RfModel grid(double nu1_hz, double rfi, int points = 7) {
    if (points < 1) throw InvalidInput("rf grid needs at least one point");
    if (!(rfi >= 0.0 && rfi < 1.0)) throw InvalidInput("rfi must lie in [0, 1)");
    RfModel m;
    m.nu1_hz = nu1_hz;
    m.rfi = rfi;
    m.members.clear();
    if (points == 1 || rfi == 0.0) {
      m.members.push_back({1.0, 1.0});
    } else {
      for (int k = 0; k < points; ++k) {
        const double s = 1.0 - rfi + 2.0 * rfi * k / (points - 1);
        m.members.push_back({s, 1.0 / points});
      }
    }
    m.validate();
    return m;
  }

  void validate() const {
    if (!(nu1_hz > 0.0)) throw InvalidInput("nu1 must be positive");
    if (members.empty()) throw InvalidInput("rf ensemble is empty");
    double total = 0.0;
    for (const auto& m : members) {
      if (!(m.scale > 0.0) || !std::isfinite(m.scale)) throw InvalidInput("rf scales must be positive");
      if (!(m.weight >= 0.0)) throw InvalidInput("rf weights must be nonnegative");
      total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("rf weights must sum to 1");
  }
};

}  // namespace falqon
