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
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "falqon/baselines.hpp"
#include "falqon/catalog.hpp"
#include "falqon/daqc.hpp"
#include "falqon/encoder.hpp"
#include "falqon/falqon.hpp"
#include "falqon/io.hpp"

namespace falqon::cli {

enum ExitCode : int { kOk = 0, kClaimFailed = 1, kUsage = 2 };

inline constexpr const char* kOutputDirEnv = "FALQON_OUTPUT_DIR";
inline constexpr const char* kDefaultOutputDir = "falqon-out";

// --- configuration -------------------------------------------------------------

struct InstanceConfig {
  std::uint64_t n = 551;
  std::string source = "catalog";  // catalog | generic
  Variant variant = Variant::full;
  std::optional<int> l_p, l_q;
  std::string catalog_file;  // empty: built-in catalog
};

struct InitConfig {
  std::optional<std::string> kind;  // zero | uniform | thermal
  double epsilon = 1e-5;
  std::optional<double> kappa;
};

struct FalqonSection {
  std::optional<double> c, dt;
  std::optional<int> max_iters;
  double beta0 = 0.0;
  std::string kick_axis = "y";
  double kick_angle = kPi / 2;
  double stall_threshold = 1e-12;
  std::string measurement = "direct";
  std::string layer_order = "problem_first";
  std::optional<double> stop_p_sol;
  bool stop_on_factors = false;
};

struct AdiabaticSection {
  std::optional<int> steps;
  std::optional<double> dt;
  std::vector<double> s;
};

struct QaoaSection {
  std::optional<int> layers;
  std::optional<double> dt;
  std::vector<std::pair<double, double>> angles;
};

struct RfSection {
  double nu1_hz = std::numeric_limits<double>::infinity();
  double rfi = 0.0;
  int points = 7;
};

struct CouplingSection {
  std::optional<std::vector<std::vector<double>>> j_hz;
  std::vector<double> offsets_hz;
  bool offsets_enabled = false;
};

struct SweepSection {
  std::vector<std::pair<double, double>> noise_grid{{0.0, 0.0}, {0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}};
  std::vector<std::string> algorithms{"falqon", "adiabatic", "qaoa"};
  std::optional<std::vector<std::uint64_t>> seeds;
  std::vector<double> nu1_grid{1000.0, 2000.0, 5000.0, std::numeric_limits<double>::infinity()};
  std::vector<double> rfi_grid{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  int rfi_iters = 100;
  std::vector<double> stepsize_c{0.25, 0.75};
  std::vector<double> stepsize_dtheta{0.0, 0.1};
};

struct RunConfig {
  InstanceConfig instance;
  std::string algorithm = "falqon";
  std::string backend = "pure";  // pure | mixed | deviation
  InitConfig init;
  std::optional<std::vector<double>> drive_weights;
  FalqonSection falqon;
  AdiabaticSection adiabatic;
  QaoaSection qaoa;
  NoiseModel noise;
  RfSection rf;
  std::string problem_realization = "ideal";  // ideal | daqc
  CouplingSection couplings;
  SweepSection sweep;
  bool record_probabilities = true;
  std::string output_dir;
  int jobs = 0;
};

namespace detail {

using falqon::detail::get_as;
using falqon::detail::reject_unknown;

inline double number_or_inf(const json& v, const std::string& where) {
  if (v.is_string()) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    throw SchemaError(where + ": expected a number or \"inf\"");
  }
  return get_as<double>(v, where);
}

inline json inf_or_number(double v) { return std::isinf(v) ? json("inf") : json(v); }

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (auto it = obj.find(key); it != obj.end()) out = get_as<T>(*it, where + "." + key);
}

template <typename T>
void read_opt(const json& obj, const char* key, std::optional<T>& out, const std::string& where) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (it->is_null()) {
      out.reset();
    } else {
      out = get_as<T>(*it, where + "." + key);
    }
  }
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline std::vector<std::pair<double, double>> read_pairs(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where + ": expected an array of pairs");
  std::vector<std::pair<double, double>> out;
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 2) throw SchemaError(where + ": expected [a, b] pairs");
    out.emplace_back(get_as<double>(e[0], where), get_as<double>(e[1], where));
  }
  return out;
}

inline json write_pairs(const std::vector<std::pair<double, double>>& v) {
  json a = json::array();
  for (const auto& [x, y] : v) a.push_back({x, y});
  return a;
}

}  // namespace detail

/// Parses a config (or a manifest carrying one under "config"). Missing keys
/// keep their defaults; unknown keys are rejected.
inline RunConfig config_from_json(const json& input) {
  using namespace detail;
  const json& j = (input.is_object() && input.contains("config") && input.contains("manifest_version"))
                      ? input["config"]
                      : input;
  reject_unknown(j, {"instance", "algorithm", "backend", "init", "drive_weights", "falqon", "adiabatic", "qaoa",
                     "noise", "rf", "problem_realization", "couplings", "sweep", "record_probabilities",
                     "output_dir", "jobs"},
                 "config");
  RunConfig c;
  if (j.contains("instance")) {
    const auto& s = j["instance"];
    reject_unknown(s, {"n", "source", "variant", "l_p", "l_q", "catalog_file"}, "instance");
    read(s, "n", c.instance.n, "instance");
    read(s, "source", c.instance.source, "instance");
    if (s.contains("variant")) {
      try {
        c.instance.variant = parse_variant(get_as<std::string>(s["variant"], "instance.variant"));
      } catch (const InvalidInput& e) {
        throw SchemaError(e.what());
      }
    }
    read_opt(s, "l_p", c.instance.l_p, "instance");
    read_opt(s, "l_q", c.instance.l_q, "instance");
    read(s, "catalog_file", c.instance.catalog_file, "instance");
  }
  read(j, "algorithm", c.algorithm, "config");
  read(j, "backend", c.backend, "config");
  if (j.contains("init")) {
    const auto& s = j["init"];
    reject_unknown(s, {"kind", "epsilon", "kappa"}, "init");
    read_opt(s, "kind", c.init.kind, "init");
    read(s, "epsilon", c.init.epsilon, "init");
    read_opt(s, "kappa", c.init.kappa, "init");
  }
  read_opt(j, "drive_weights", c.drive_weights, "config");
  if (j.contains("falqon")) {
    const auto& s = j["falqon"];
    reject_unknown(s, {"c", "dt", "max_iters", "beta0", "kick", "stall_threshold", "measurement", "layer_order",
                       "stop_p_sol", "stop_on_factors"},
                   "falqon");
    auto& f = c.falqon;
    read_opt(s, "c", f.c, "falqon");
    read_opt(s, "dt", f.dt, "falqon");
    read_opt(s, "max_iters", f.max_iters, "falqon");
    read(s, "beta0", f.beta0, "falqon");
    if (s.contains("kick")) {
      const auto& k = s["kick"];
      reject_unknown(k, {"axis", "angle"}, "falqon.kick");
      read(k, "axis", f.kick_axis, "falqon.kick");
      read(k, "angle", f.kick_angle, "falqon.kick");
    }
    read(s, "stall_threshold", f.stall_threshold, "falqon");
    read(s, "measurement", f.measurement, "falqon");
    read(s, "layer_order", f.layer_order, "falqon");
    read_opt(s, "stop_p_sol", f.stop_p_sol, "falqon");
    read(s, "stop_on_factors", f.stop_on_factors, "falqon");
  }
  if (j.contains("adiabatic")) {
    const auto& s = j["adiabatic"];
    reject_unknown(s, {"steps", "dt", "s"}, "adiabatic");
    read_opt(s, "steps", c.adiabatic.steps, "adiabatic");
    read_opt(s, "dt", c.adiabatic.dt, "adiabatic");
    read(s, "s", c.adiabatic.s, "adiabatic");
  }
  if (j.contains("qaoa")) {
    const auto& s = j["qaoa"];
    reject_unknown(s, {"layers", "dt", "angles"}, "qaoa");
    read_opt(s, "layers", c.qaoa.layers, "qaoa");
    read_opt(s, "dt", c.qaoa.dt, "qaoa");
    if (s.contains("angles")) c.qaoa.angles = read_pairs(s["angles"], "qaoa.angles");
  }
  if (j.contains("noise")) {
    const auto& s = j["noise"];
    reject_unknown(s, {"dtheta", "dphi", "seed", "flip_error"}, "noise");
    read(s, "dtheta", c.noise.dtheta, "noise");
    read(s, "dphi", c.noise.dphi, "noise");
    read(s, "seed", c.noise.seed, "noise");
    if (s.contains("flip_error")) {
      try {
        c.noise.flip_error = parse_flip_error(get_as<std::string>(s["flip_error"], "noise.flip_error"));
      } catch (const InvalidInput& e) {
        throw SchemaError(e.what());
      }
    }
  }
  if (j.contains("rf")) {
    const auto& s = j["rf"];
    reject_unknown(s, {"nu1_hz", "rfi", "points"}, "rf");
    if (s.contains("nu1_hz")) c.rf.nu1_hz = number_or_inf(s["nu1_hz"], "rf.nu1_hz");
    read(s, "rfi", c.rf.rfi, "rf");
    read(s, "points", c.rf.points, "rf");
  }
  read(j, "problem_realization", c.problem_realization, "config");
  if (j.contains("couplings")) {
    const auto& s = j["couplings"];
    reject_unknown(s, {"J_hz", "offsets_hz", "offsets_enabled"}, "couplings");
    read_opt(s, "J_hz", c.couplings.j_hz, "couplings");
    read(s, "offsets_hz", c.couplings.offsets_hz, "couplings");
    read(s, "offsets_enabled", c.couplings.offsets_enabled, "couplings");
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    reject_unknown(s, {"noise_grid", "algorithms", "seeds", "nu1_grid", "rfi_grid", "rfi_iters", "stepsize_c",
                       "stepsize_dtheta"},
                   "sweep");
    auto& w = c.sweep;
    if (s.contains("noise_grid")) w.noise_grid = read_pairs(s["noise_grid"], "sweep.noise_grid");
    read(s, "algorithms", w.algorithms, "sweep");
    read_opt(s, "seeds", w.seeds, "sweep");
    if (s.contains("nu1_grid")) {
      if (!s["nu1_grid"].is_array()) throw SchemaError("sweep.nu1_grid must be an array");
      w.nu1_grid.clear();
      for (const auto& v : s["nu1_grid"]) w.nu1_grid.push_back(number_or_inf(v, "sweep.nu1_grid"));
    }
    read(s, "rfi_grid", w.rfi_grid, "sweep");
    read(s, "rfi_iters", w.rfi_iters, "sweep");
    read(s, "stepsize_c", w.stepsize_c, "sweep");
    read(s, "stepsize_dtheta", w.stepsize_dtheta, "sweep");
  }
  read(j, "record_probabilities", c.record_probabilities, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "jobs", c.jobs, "config");
  return c;
}

inline json config_to_json(const RunConfig& c) {
  using namespace detail;
  json nu1 = json::array();
  for (double v : c.sweep.nu1_grid) nu1.push_back(inf_or_number(v));
  return {
      {"instance",
       {{"n", c.instance.n},
        {"source", c.instance.source},
        {"variant", to_string(c.instance.variant)},
        {"l_p", opt(c.instance.l_p)},
        {"l_q", opt(c.instance.l_q)},
        {"catalog_file", c.instance.catalog_file}}},
      {"algorithm", c.algorithm},
      {"backend", c.backend},
      {"init", {{"kind", opt(c.init.kind)}, {"epsilon", c.init.epsilon}, {"kappa", opt(c.init.kappa)}}},
      {"drive_weights", opt(c.drive_weights)},
      {"falqon",
       {{"c", opt(c.falqon.c)},
        {"dt", opt(c.falqon.dt)},
        {"max_iters", opt(c.falqon.max_iters)},
        {"beta0", c.falqon.beta0},
        {"kick", {{"axis", c.falqon.kick_axis}, {"angle", c.falqon.kick_angle}}},
        {"stall_threshold", c.falqon.stall_threshold},
        {"measurement", c.falqon.measurement},
        {"layer_order", c.falqon.layer_order},
        {"stop_p_sol", opt(c.falqon.stop_p_sol)},
        {"stop_on_factors", c.falqon.stop_on_factors}}},
      {"adiabatic", {{"steps", opt(c.adiabatic.steps)}, {"dt", opt(c.adiabatic.dt)}, {"s", c.adiabatic.s}}},
      {"qaoa", {{"layers", opt(c.qaoa.layers)}, {"dt", opt(c.qaoa.dt)}, {"angles", write_pairs(c.qaoa.angles)}}},
      {"noise",
       {{"dtheta", c.noise.dtheta},
        {"dphi", c.noise.dphi},
        {"seed", c.noise.seed},
        {"flip_error", to_string(c.noise.flip_error)}}},
      {"rf", {{"nu1_hz", inf_or_number(c.rf.nu1_hz)}, {"rfi", c.rf.rfi}, {"points", c.rf.points}}},
      {"problem_realization", c.problem_realization},
      {"couplings",
       {{"J_hz", opt(c.couplings.j_hz)},
        {"offsets_hz", c.couplings.offsets_hz},
        {"offsets_enabled", c.couplings.offsets_enabled}}},
      {"sweep",
       {{"noise_grid", write_pairs(c.sweep.noise_grid)},
        {"algorithms", c.sweep.algorithms},
        {"seeds", opt(c.sweep.seeds)},
        {"nu1_grid", nu1},
        {"rfi_grid", c.sweep.rfi_grid},
        {"rfi_iters", c.sweep.rfi_iters},
        {"stepsize_c", c.sweep.stepsize_c},
        {"stepsize_dtheta", c.sweep.stepsize_dtheta}}},
      {"record_probabilities", c.record_probabilities},
      {"output_dir", c.output_dir},
      {"jobs", c.jobs},
  };
}

// --- resolution -------------------------------------------------------------------

/// Everything a run needs, built from a config.
struct Resolved {
  RunConfig config;  // with every automatic value filled in
  Problem problem;
  std::string source_label;  // e.g. "catalog 551/full"
  std::optional<DaqcSchedule> schedule;
  RfModel rf;
};

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline std::string resolve_output_dir(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return kDefaultOutputDir;
}

inline void check_choice(const std::string& v, std::initializer_list<const char*> allowed, const std::string& what) {
  for (const char* a : allowed) {
    if (v == a) return;
  }
  std::string msg = what + " must be one of:";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw SchemaError(msg + " (got '" + v + "')");
}

/// Builds the problem for an instance config.
inline std::tuple<ZPolynomial, DecodingRule, std::vector<Index>, std::string> build_instance(const InstanceConfig& ic) {
  if (ic.source == "catalog") {
    const auto catalog = ic.catalog_file.empty() ? builtin_catalog() : read_catalog_file(ic.catalog_file);
    const auto& e = find_entry(catalog, ic.n, ic.variant);
    return {e.hamiltonian, e.rule, solution_states(e.rule, e.n), "catalog " + e.key()};
  }
  if (ic.source != "generic") throw SchemaError("instance.source must be catalog or generic");
  const auto inst = (ic.l_p || ic.l_q) ? FactorInstance::make(ic.n, ic.l_p.value_or(0), ic.l_q.value_or(0))
                                       : FactorInstance::make(ic.n);
  if (inst.n_qubits() == 0) throw InvalidInput("instance has no free variables");
  auto h = boolean_to_zpoly(build_cost(inst), inst.layout(), inst.n_qubits());
  const auto g = brute_force_ground_states(h);
  std::vector<Index> sol;
  if (std::abs(g.energy) <= kDegeneracyTol) sol = g.states;
  return {h, DecodingRule::from_instance(inst), sol,
          "generic n=" + std::to_string(ic.n) + " l_p=" + std::to_string(inst.l_p) + " l_q=" + std::to_string(inst.l_q)};
}

inline Resolved resolve(RunConfig c) {
  check_choice(c.algorithm, {"falqon", "adiabatic", "qaoa"}, "algorithm");
  check_choice(c.backend, {"pure", "mixed", "deviation"}, "backend");
  check_choice(c.problem_realization, {"ideal", "daqc"}, "problem_realization");
  check_choice(c.falqon.kick_axis, {"none", "drive", "y"}, "falqon.kick.axis");
  check_choice(c.falqon.measurement, {"direct", "tomography"}, "falqon.measurement");
  check_choice(c.falqon.layer_order, {"problem_first", "drive_first"}, "falqon.layer_order");
  for (const auto& a : c.sweep.algorithms) check_choice(a, {"falqon", "adiabatic", "qaoa"}, "sweep.algorithms");

  auto [h, rule, sol, label] = build_instance(c.instance);
  const int nq = h.n_qubits();
  const bool small = nq <= 3;
  if (c.instance.source == "generic") {
    const auto inst = (c.instance.l_p || c.instance.l_q)
                          ? FactorInstance::make(c.instance.n, c.instance.l_p.value_or(0), c.instance.l_q.value_or(0))
                          : FactorInstance::make(c.instance.n);
    c.instance.l_p = inst.l_p;
    c.instance.l_q = inst.l_q;
  }

  if (!c.init.kind) c.init.kind = c.backend == "deviation" ? "thermal" : (small ? "uniform" : "zero");
  check_choice(*c.init.kind, {"zero", "uniform", "thermal"}, "init.kind");
  if (c.backend == "deviation" && *c.init.kind != "thermal") throw SchemaError("the deviation backend needs init.kind thermal");
  if (c.backend == "pure" && *c.init.kind == "thermal") throw SchemaError("a thermal start needs the mixed or deviation backend");
  if (c.backend == "deviation" && !c.init.kappa) c.init.kappa = 1.0 / nq;

  if (!c.drive_weights) c.drive_weights = default_drive_weights(nq);
  if (static_cast<int>(c.drive_weights->size()) != nq) throw SchemaError("drive_weights length differs from qubit count");

  // Defaults: the three-qubit protocol, or the slower schedule the 5- and
  // 9-qubit catalog instances need.
  if (!c.falqon.c) c.falqon.c = small ? 0.25 : 0.03;
  if (!c.falqon.dt) c.falqon.dt = small ? 0.2 : 0.01;
  if (!c.falqon.max_iters) c.falqon.max_iters = small ? 22 : 300;
  if (!c.adiabatic.steps) c.adiabatic.steps = c.adiabatic.s.empty() ? *c.falqon.max_iters : static_cast<int>(c.adiabatic.s.size());
  if (!c.adiabatic.dt) c.adiabatic.dt = *c.falqon.dt;
  if (!c.qaoa.layers) c.qaoa.layers = c.qaoa.angles.empty() ? *c.falqon.max_iters : static_cast<int>(c.qaoa.angles.size());
  if (!c.qaoa.dt) c.qaoa.dt = *c.falqon.dt;
  if (!c.adiabatic.s.empty() && static_cast<int>(c.adiabatic.s.size()) != *c.adiabatic.steps) {
    throw SchemaError("adiabatic.steps disagrees with adiabatic.s");
  }
  if (!c.qaoa.angles.empty() && static_cast<int>(c.qaoa.angles.size()) != *c.qaoa.layers) {
    throw SchemaError("qaoa.layers disagrees with qaoa.angles");
  }
  c.output_dir = resolve_output_dir(c.output_dir);
  if (c.jobs < 0) throw SchemaError("jobs must be nonnegative");

  Resolved r;
  try {
    c.noise.validate();
    r.rf = RfModel::grid(c.rf.nu1_hz, c.rf.rfi, c.rf.points);
    r.problem = Problem::make(h, *c.drive_weights, sol, rule, c.instance.n);
  } catch (const InvalidInput& e) {
    throw SchemaError(e.what());
  }

  if (c.problem_realization == "daqc" || !r.rf.ideal_pulses()) {
    Couplings cp;
    if (c.couplings.j_hz) {
      const auto& m = *c.couplings.j_hz;
      if (static_cast<int>(m.size()) != nq) throw SchemaError("couplings.J_hz must be n x n");
      cp.j_hz = Eigen::MatrixXd::Zero(nq, nq);
      for (int i = 0; i < nq; ++i) {
        if (static_cast<int>(m[static_cast<std::size_t>(i)].size()) != nq) throw SchemaError("couplings.J_hz must be n x n");
        for (int k = 0; k < nq; ++k) cp.j_hz(i, k) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      }
    } else if (nq == 3) {
      cp = Couplings::synthetic3();
      std::vector<std::vector<double>> m(3, std::vector<double>(3));
      for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = cp.j_hz(i, k);
      }
      c.couplings.j_hz = m;
    } else {
      throw SchemaError("couplings.J_hz is required for DAQC on more than three qubits");
    }
    if (c.couplings.offsets_hz.empty()) c.couplings.offsets_hz.assign(static_cast<std::size_t>(nq), 0.0);
    cp.offsets_hz = c.couplings.offsets_hz;
    cp.offsets_enabled = c.couplings.offsets_enabled;
    if (c.problem_realization == "daqc") {
      try {
        cp.validate();
        r.schedule = daqc_schedule(cp, h, *c.falqon.dt);
      } catch (const InvalidInput& e) {
        throw SchemaError(std::string("daqc: ") + e.what());
      }
    }
  }
  r.config = std::move(c);
  r.source_label = label;
  return r;
}

inline QuantumState initial_state(const Resolved& r) {
  const auto& c = r.config;
  InitOptions o;
  const std::string& k = *c.init.kind;
  o.kind = k == "zero" ? InitKind::zero : (k == "uniform" ? InitKind::uniform : InitKind::thermal);
  o.epsilon = c.init.epsilon;
  o.deviation = c.backend == "deviation";
  o.kappa = c.init.kappa;
  QuantumState s = init_state(r.problem.n_qubits(), o);
  if (c.backend == "mixed" && s.backend() == Backend::pure) s = s.as_mixed();
  return s;
}

inline FalqonConfig falqon_config(const RunConfig& c) {
  FalqonConfig f;
  f.c = *c.falqon.c;
  f.dt = *c.falqon.dt;
  f.max_iters = *c.falqon.max_iters;
  f.beta0 = c.falqon.beta0;
  f.kick_axis = c.falqon.kick_axis == "none" ? KickAxis::none : (c.falqon.kick_axis == "drive" ? KickAxis::drive : KickAxis::y);
  f.kick_angle = c.falqon.kick_angle;
  f.stall_threshold = c.falqon.stall_threshold;
  f.measurement = c.falqon.measurement == "direct" ? MeasurementMode::direct : MeasurementMode::tomography;
  f.layer_order = c.falqon.layer_order == "problem_first" ? LayerOrder::problem_first : LayerOrder::drive_first;
  f.stop_p_sol = c.falqon.stop_p_sol;
  f.stop_on_factors = c.falqon.stop_on_factors;
  f.record_probabilities = c.record_probabilities;
  return f;
}

inline RampSchedule ramp_schedule(const RunConfig& c) {
  if (c.adiabatic.s.empty()) return RampSchedule::linear(*c.adiabatic.steps, *c.adiabatic.dt);
  RampSchedule r;
  r.dt = *c.adiabatic.dt;
  r.s = c.adiabatic.s;
  return r;
}

inline QaoaSchedule qaoa_schedule(const RunConfig& c) {
  if (c.qaoa.angles.empty()) return QaoaSchedule::linear_ramp(*c.qaoa.layers, *c.qaoa.dt);
  QaoaSchedule q;
  q.layers = c.qaoa.angles;
  return q;
}

/// Runs one trajectory of `algorithm` with the given noise.
inline TrajectoryRecord run_algorithm(const Resolved& r, const std::string& algorithm, const NoiseModel& noise,
                                      const FalqonConfig& fc) {
  const QuantumState s0 = initial_state(r);
  if (algorithm == "falqon") {
    return run_falqon(r.problem, s0, fc, noise, r.rf, r.schedule ? &*r.schedule : nullptr);
  }
  if (algorithm == "adiabatic") {
    const QuantumState plus = r.config.backend == "pure" ? plus_state(r.problem.n_qubits())
                                                         : plus_state(r.problem.n_qubits()).as_mixed();
    return run_adiabatic(r.problem, ramp_schedule(r.config), noise, &plus, fc.record_probabilities);
  }
  return run_qaoa(r.problem, qaoa_schedule(r.config), noise, fc.record_probabilities);
}

inline json hamiltonian_identity(const Resolved& r) {
  const json hj = to_json(r.problem.h);
  return {{"source", r.source_label},
          {"n", r.config.instance.n},
          {"n_qubits", r.problem.n_qubits()},
          {"n_terms", r.problem.h.terms().size()},
          {"fingerprint_fnv1a", hex64(fnv1a(hj.dump()))}};
}

inline std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json manifest(const std::string& command, const Resolved& r, const json& extra) {
  json m = {{"manifest_version", 1},
            {"command", command},
            {"library_version", kVersion},
            {"config", config_to_json(r.config)},
            {"seed", r.config.noise.seed},
            {"hamiltonian", hamiltonian_identity(r)},
            {"noise_distribution", "uniform half-widths, one draw per qubit per drive pulse"},
            {"noise_injection", "drive rotations only"}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  m["metadata"] = {{"generated_at", utc_timestamp()}};
  return m;
}

inline std::string prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

inline std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

// --- ordered worker pool ----------------------------------------------------------

/// Runs tasks on `jobs` threads (0 = hardware concurrency); results come back
/// in task order. The first exception is rethrown after all workers stop.
template <typename R>
std::vector<R> parallel_ordered(const std::vector<std::function<R()>>& tasks, int jobs) {
  std::vector<R> out(tasks.size());
  int n = jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n = std::max(1, std::min<int>(n, static_cast<int>(tasks.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        out[i] = tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// --- commands -----------------------------------------------------------------------

struct EncodeOptions {
  std::uint64_t n = 0;
  bool catalog = false;
  Variant variant = Variant::full;
  std::optional<int> l_p, l_q;
  bool all_splits = false;
  std::string output_dir;
};

inline json encode_instance_json(const FactorInstance& inst, const ZPolynomial& h) {
  json layout = json::array();
  for (const auto& e : inst.variable_layout) layout.push_back({{"name", e.name}, {"qubit", e.qubit + 1}});
  const auto g = brute_force_ground_states(h);
  json ground = json::array();
  for (Index m : g.states) ground.push_back(bitstring(m, h.n_qubits()));
  return {{"n", inst.n},
          {"l_p", inst.l_p},
          {"l_q", inst.l_q},
          {"variable_layout", layout},
          {"decoding_rule", to_json(DecodingRule::from_instance(inst))},
          {"hamiltonian", to_json(h)},
          {"ground_energy", g.energy},
          {"ground_states", ground}};
}

inline int cmd_encode(const EncodeOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.n % 2 == 0) throw InvalidInput("n must be odd");
    if (o.n < 9) throw InvalidInput("n must be at least 9");
    const std::string dir = prepare_dir(resolve_output_dir(o.output_dir));
    if (o.catalog) {
      const auto catalog = builtin_catalog();
      const auto& e = find_entry(catalog, o.n, o.variant);
      const json j = {{"n", e.n},
                      {"variant", to_string(e.variant)},
                      {"hamiltonian", to_json(e.hamiltonian)},
                      {"decoding_rule", to_json(e.rule)},
                      {"factors", {e.factors.first, e.factors.second}},
                      {"note", e.note}};
      const std::string stem = "encode_" + std::to_string(o.n) + "_" + to_string(o.variant);
      write_text_file(join(dir, stem + ".json"), j.dump(2) + "\n");
      write_text_file(join(dir, stem + ".txt"), e.hamiltonian.to_string() + "\n");
      out << e.hamiltonian.to_string() << "\n";
      return kOk;
    }
    std::vector<std::pair<int, int>> splits;
    if (o.all_splits) {
      splits = factor_splits(o.n);
    } else if (o.l_p || o.l_q) {
      splits.push_back({o.l_p.value_or(0), o.l_q.value_or(0)});
    } else {
      const int l = default_factor_length(bit_length(o.n));
      splits.push_back({l, l});
    }
    json all = json::array();
    std::ostringstream listing;
    for (const auto& [lp, lq] : splits) {
      const auto inst = FactorInstance::make(o.n, lp, lq);
      if (inst.n_qubits() > kEnumerationGuard) throw SizeGuard("instance needs more than 24 qubits");
      const auto h = boolean_to_zpoly(build_cost(inst), inst.layout(), inst.n_qubits());
      all.push_back(encode_instance_json(inst, h));
      listing << "# n=" << o.n << " l_p=" << lp << " l_q=" << lq << " qubits=" << inst.n_qubits() << "\n"
              << h.to_string() << "\n";
    }
    const std::string stem = "encode_" + std::to_string(o.n) + "_generic";
    write_text_file(join(dir, stem + ".json"), (all.size() == 1 ? all[0] : all).dump(2) + "\n");
    write_text_file(join(dir, stem + ".txt"), listing.str());
    out << listing.str();
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

/// Factor report of the two most probable states at the final row.
inline json factor_report(const Resolved& r, const TrajectoryRecord& rec) {
  json rep = {{"n", r.config.instance.n}, {"algorithm", rec.algorithm}, {"rows", rec.rows.size()}};
  if (rec.rows.empty()) return rep;
  const auto& last = rec.rows.back();
  const std::vector<double>& probs = last.probs;
  if (probs.empty()) throw Error("final row carries no probabilities");
  const auto [a, b] = top_two(probs);
  json top = json::array();
  for (Index m : {a, b}) {
    const auto [p, q] = decode_factors(m, *r.problem.rule);
    top.push_back({{"state", bitstring(m, r.problem.n_qubits())},
                   {"probability", probs[m]},
                   {"p", p},
                   {"q", q},
                   {"product_matches", p * q == r.config.instance.n}});
  }
  const auto [p, q] = decode_factors(a, *r.problem.rule);
  rep["top_states"] = top;
  rep["factors"] = {std::min(p, q), std::max(p, q)};
  rep["verified"] = p * q == r.config.instance.n;
  rep["final_energy"] = last.energy;
  rep["final_p_sol"] = last.p_sol;
  return rep;
}

inline RunConfig load_config(const std::string& path) {
  return path.empty() ? RunConfig{} : config_from_json(read_json_file(path));
}

inline int cmd_factor(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Resolved r = resolve(cfg);
    FalqonConfig fc = falqon_config(r.config);
    fc.record_probabilities = true;
    const auto rec = run_algorithm(r, r.config.algorithm, r.config.noise, fc);
    const json rep = factor_report(r, rec);
    const std::string dir = prepare_dir(r.config.output_dir);
    TrajectoryRecord written = rec;
    if (!r.config.record_probabilities) {
      for (auto& row : written.rows) row.probs.clear();
    }
    write_text_file(join(dir, "trajectory.csv"), trajectory_csv(written));
    write_text_file(join(dir, "report.json"), rep.dump(2) + "\n");
    json meta = json::object();
    for (const auto& [k, v] : rec.metadata) meta[k] = v;
    write_text_file(join(dir, "manifest.json"),
                    manifest("factor", r, {{"run_metadata", meta}, {"warnings", rec.warnings},
                                           {"outputs", {"trajectory.csv", "report.json"}}})
                            .dump(2) +
                        "\n");
    for (const auto& w : rec.warnings) err << "warning: " << w << "\n";
    out << "n = " << r.config.instance.n << " (" << r.source_label << ", " << rec.algorithm << ", "
        << rec.rows.size() << " rows)\n";
    if (rep.contains("top_states")) {
      for (const auto& t : rep["top_states"]) {
        out << "  |" << t["state"].get<std::string>() << ">  p = " << std::setprecision(6)
            << t["probability"].get<double>() << "  ->  " << t["p"].get<std::uint64_t>() << " x "
            << t["q"].get<std::uint64_t>() << "\n";
      }
    }
    const bool ok = rep.value("verified", false);
    out << (ok ? "factors verified" : "factors not verified") << "\n";
    return ok ? kOk : kClaimFailed;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

namespace detail {

inline std::vector<std::uint64_t> default_seeds(std::size_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = i;
  return s;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Unbiased sample variance, shifted by the first sample so identical
/// samples give exactly zero.
inline double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double s = 0.0, s2 = 0.0;
  for (double x : v) {
    s += x - v[0];
    s2 += (x - v[0]) * (x - v[0]);
  }
  const double n = static_cast<double>(v.size());
  return std::max(0.0, (s2 - s * s / n) / (n - 1.0));
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace detail

/// Long-format noise sweep: every (algorithm, dtheta, dphi, seed) trajectory.
inline int cmd_sweep_noise(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    RunConfig c = cfg;
    if (!c.sweep.seeds) c.sweep.seeds = detail::default_seeds(20);
    const Resolved r = resolve(c);
    const auto& seeds = *r.config.sweep.seeds;
    FalqonConfig fc = falqon_config(r.config);
    fc.record_probabilities = false;

    struct Cell {
      std::string algorithm;
      double dtheta, dphi;
      std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const auto& alg : r.config.sweep.algorithms) {
      for (const auto& [dth, dph] : r.config.sweep.noise_grid) {
        for (auto s : seeds) cells.push_back({alg, dth, dph, s});
      }
    }
    std::vector<std::function<TrajectoryRecord()>> tasks;
    for (const auto& cell : cells) {
      tasks.push_back([&r, &fc, cell] {
        NoiseModel nm = r.config.noise;
        nm.dtheta = cell.dtheta;
        nm.dphi = cell.dphi;
        nm.seed = cell.seed;
        return run_algorithm(r, cell.algorithm, nm, fc);
      });
    }
    const auto results = parallel_ordered(tasks, r.config.jobs);

    std::ostringstream csv;
    csv << "algorithm,dtheta,dphi,seed,iter,beta,energy,p_sol\n";
    std::ostringstream summary;
    summary << "algorithm,dtheta,dphi,n_seeds,mean_final_energy,var_final_energy,mean_final_p_sol\n";
    std::map<std::string, std::vector<double>> means;  // per algorithm, in grid order
    for (std::size_t i = 0; i < cells.size();) {
      std::vector<double> fe, fp;
      const auto& head = cells[i];
      for (std::size_t k = 0; k < seeds.size(); ++k, ++i) {
        const auto& cell = cells[i];
        for (const auto& row : results[i].rows) {
          csv << cell.algorithm << ',' << format_double(cell.dtheta) << ',' << format_double(cell.dphi) << ','
              << cell.seed << ',' << row.iter << ',' << format_double(row.beta) << ',' << format_double(row.energy)
              << ',' << format_double(row.p_sol) << '\n';
        }
        fe.push_back(results[i].rows.back().energy);
        fp.push_back(results[i].rows.back().p_sol);
      }
      summary << head.algorithm << ',' << format_double(head.dtheta) << ',' << format_double(head.dphi) << ','
              << seeds.size() << ',' << format_double(detail::mean(fe)) << ',' << format_double(detail::variance(fe))
              << ',' << format_double(detail::mean(fp)) << '\n';
      means[head.algorithm].push_back(detail::mean(fe));
    }
    json checks = json::object();
    for (const auto& [alg, m] : means) {
      checks[alg + "_mean_final_energy_non_decreasing"] = std::is_sorted(m.begin(), m.end());
    }
    const std::string dir = prepare_dir(r.config.output_dir);
    write_text_file(join(dir, "noise_sweep.csv"), csv.str());
    write_text_file(join(dir, "noise_summary.csv"), summary.str());
    write_text_file(join(dir, "manifest.json"),
                    manifest("sweep-noise", r, {{"seeds", seeds}, {"checks", checks},
                                                {"outputs", {"noise_sweep.csv", "noise_summary.csv"}}})
                            .dump(2) +
                        "\n");
    out << summary.str();
    return kOk;
  });
}

/// Ensemble-averaged gate fidelity of the DAQC problem layer.
inline double daqc_ensemble_fidelity(const DaqcSchedule& s, const ZPolynomial& h, double dt, const RfModel& rf) {
  const DenseMatrix target = expm_hermitian(dense(h), dt);
  double f = 0.0;
  for (const auto& m : rf.members) f += m.weight * gate_fidelity(target, daqc_unitary(s, rf.nu1_hz, m.scale));
  return f;
}

/// FALQON with a DAQC problem layer over an (nu1, rfi) grid.
inline int cmd_sweep_rfi(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    RunConfig c = cfg;
    c.problem_realization = "daqc";
    c.algorithm = "falqon";
    if (!c.falqon.max_iters) c.falqon.max_iters = c.sweep.rfi_iters;
    const Resolved base = resolve(c);
    FalqonConfig fc = falqon_config(base.config);
    fc.record_probabilities = false;

    struct Cell {
      double nu1, rfi;
    };
    std::vector<Cell> cells;
    for (double nu1 : base.config.sweep.nu1_grid) {
      for (double rfi : base.config.sweep.rfi_grid) cells.push_back({nu1, rfi});
    }
    struct Result {
      double min_e = 0.0, final_e = 0.0, final_p = 0.0, fidelity = 0.0;
    };
    std::vector<std::function<Result()>> tasks;
    for (const auto& cell : cells) {
      tasks.push_back([&base, &fc, cell] {
        RfModel rf;
        try {
          rf = RfModel::grid(cell.nu1, cell.rfi, base.config.rf.points);
        } catch (const InvalidInput& e) {
          throw SchemaError(std::string("sweep grid: ") + e.what());
        }
        const auto rec = run_falqon(base.problem, initial_state(base), fc, base.config.noise, rf, &*base.schedule);
        Result res;
        res.min_e = rec.rows.front().energy;
        for (const auto& row : rec.rows) res.min_e = std::min(res.min_e, row.energy);
        res.final_e = rec.rows.back().energy;
        res.final_p = rec.rows.back().p_sol;
        res.fidelity = daqc_ensemble_fidelity(*base.schedule, base.problem.h, fc.dt, rf);
        return res;
      });
    }
    const auto results = parallel_ordered(tasks, base.config.jobs);
    std::ostringstream csv;
    csv << "nu1_hz,rfi,seed,min_energy,final_energy,final_p_sol,daqc_fidelity\n";
    json checks = json::object();
    bool fid_monotone = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& cell = cells[i];
      csv << (std::isinf(cell.nu1) ? std::string("inf") : format_double(cell.nu1)) << ',' << format_double(cell.rfi)
          << ',' << base.config.noise.seed << ',' << format_double(results[i].min_e) << ','
          << format_double(results[i].final_e) << ',' << format_double(results[i].final_p) << ','
          << format_double(results[i].fidelity) << '\n';
      if (i > 0 && cells[i - 1].nu1 == cell.nu1 && cells[i - 1].rfi <= cell.rfi &&
          results[i].fidelity > results[i - 1].fidelity + 1e-12) {
        fid_monotone = false;
      }
    }
    checks["fidelity_non_increasing_in_rfi"] = fid_monotone;
    const std::string dir = prepare_dir(base.config.output_dir);
    write_text_file(join(dir, "rfi_sweep.csv"), csv.str());
    write_text_file(join(dir, "daqc_schedule.json"), to_json(*base.schedule).dump(2) + "\n");
    write_text_file(join(dir, "manifest.json"),
                    manifest("sweep-rfi", base, {{"checks", checks},
                                                 {"outputs", {"rfi_sweep.csv", "daqc_schedule.json"}}})
                            .dump(2) +
                        "\n");
    out << csv.str();
    return kOk;
  });
}

/// Seeded FALQON trajectories over a (c, dtheta) grid.
inline int cmd_sweep_stepsize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    RunConfig c = cfg;
    c.algorithm = "falqon";
    if (!c.sweep.seeds) c.sweep.seeds = detail::default_seeds(10);
    const Resolved r = resolve(c);
    const auto& seeds = *r.config.sweep.seeds;

    struct Cell {
      double c, dtheta;
      std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double sc : r.config.sweep.stepsize_c) {
      if (!(sc > 0.0)) throw SchemaError("sweep.stepsize_c values must be positive");
      for (double d : r.config.sweep.stepsize_dtheta) {
        for (auto s : seeds) cells.push_back({sc, d, s});
      }
    }
    std::vector<std::function<TrajectoryRecord()>> tasks;
    for (const auto& cell : cells) {
      tasks.push_back([&r, cell] {
        FalqonConfig fc = falqon_config(r.config);
        fc.c = cell.c;
        fc.record_probabilities = false;
        NoiseModel nm = r.config.noise;
        nm.dtheta = cell.dtheta;
        nm.seed = cell.seed;
        return run_algorithm(r, "falqon", nm, fc);
      });
    }
    const auto results = parallel_ordered(tasks, r.config.jobs);
    std::ostringstream csv;
    csv << "c,dtheta,seed,iter,beta,energy,p_sol\n";
    std::ostringstream summary;
    summary << "c,dtheta,n_seeds,mean_final_p_sol,var_final_p_sol,mean_final_energy\n";
    for (std::size_t i = 0; i < cells.size();) {
      const auto& head = cells[i];
      std::vector<double> fp, fe;
      for (std::size_t k = 0; k < seeds.size(); ++k, ++i) {
        for (const auto& row : results[i].rows) {
          csv << format_double(cells[i].c) << ',' << format_double(cells[i].dtheta) << ',' << cells[i].seed << ','
              << row.iter << ',' << format_double(row.beta) << ',' << format_double(row.energy) << ','
              << format_double(row.p_sol) << '\n';
        }
        fp.push_back(results[i].rows.back().p_sol);
        fe.push_back(results[i].rows.back().energy);
      }
      summary << format_double(head.c) << ',' << format_double(head.dtheta) << ',' << seeds.size() << ','
              << format_double(detail::mean(fp)) << ',' << format_double(detail::variance(fp)) << ','
              << format_double(detail::mean(fe)) << '\n';
    }
    const std::string dir = prepare_dir(r.config.output_dir);
    write_text_file(join(dir, "stepsize_sweep.csv"), csv.str());
    write_text_file(join(dir, "stepsize_summary.csv"), summary.str());
    write_text_file(join(dir, "manifest.json"),
                    manifest("sweep-stepsize", r,
                             {{"seeds", seeds}, {"outputs", {"stepsize_sweep.csv", "stepsize_summary.csv"}}})
                            .dump(2) +
                        "\n");
    out << summary.str();
    return kOk;
  });
}

// --- verify ----------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Random pure (even seeds) and mixed (odd seeds) states for oracle checks.
inline QuantumState random_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const auto dim = static_cast<Eigen::Index>(dimension(n));
  if (seed % 2 == 0) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
    return QuantumState::pure(v / v.norm());
  }
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) a(i, k) = Complex(g(rng), g(rng));
  }
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) / 2.0;
  return QuantumState::mixed(rho);
}

inline std::vector<CheckResult> verify_suite(const std::vector<CatalogEntry>& catalog) {
  std::vector<CheckResult> out;
  for (const auto& e : catalog) {
    CheckResult c{"ground states decode " + e.key(), false, ""};
    const auto g = brute_force_ground_states(e.hamiltonian);
    const auto sol = solution_states(e.rule, e.n);
    bool ok = g.states == sol && !sol.empty();
    std::ostringstream d;
    d << "E0=" << g.energy << " states:";
    for (Index m : g.states) {
      const auto [p, q] = decode_factors(m, e.rule);
      d << " " << bitstring(m, e.hamiltonian.n_qubits()) << "->" << p << "x" << q;
      ok = ok && std::min(p, q) == std::min(e.factors.first, e.factors.second) &&
           std::max(p, q) == std::max(e.factors.first, e.factors.second);
    }
    c.pass = ok;
    c.detail = d.str();
    out.push_back(c);
  }
  for (const auto& full : catalog) {
    if (full.variant != Variant::full) continue;
    for (const auto& tr : catalog) {
      if (tr.n != full.n || tr.variant != Variant::truncated) continue;
      const bool ok = verify_truncation(full.hamiltonian, tr.hamiltonian);
      out.push_back({"truncation keeps ground set " + std::to_string(full.n), ok, ok ? "identical" : "differs"});
    }
  }
  for (const auto& e : catalog) {
    const int n = e.hamiltonian.n_qubits();
    if (n > 5) continue;
    const auto w = default_drive_weights(n);
    const auto c = commutator_with_drive(e.hamiltonian, w);
    const auto groups = tomography_groups(c);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto st = random_state(n, s);
      worst = std::max(worst, std::abs(st.expectation(c) - expectation_tomography(st, groups)));
    }
    const DenseMatrix hp = dense(e.hamiltonian);
    const DenseMatrix hd = dense_drive(w);
    const DenseMatrix ic = Complex(0, 1) * (hp * hd - hd * hp);
    const double recon = (reconstruct(groups, n) - ic).cwiseAbs().maxCoeff();
    const double sym = (dense(c) - ic).cwiseAbs().maxCoeff();
    std::ostringstream d;
    d << "max |direct-tomo| " << worst << ", reconstruction " << recon << ", symbolic " << sym;
    out.push_back({"tomography equals direct " + e.key(), worst <= 1e-10 && recon <= 1e-12 && sym <= 1e-12, d.str()});
  }
  {
    ZPolynomial h = falqon::detail::hp_551();
    for (const auto& e : catalog) {
      if (e.n == 551 && e.variant == Variant::full) h = e.hamiltonian;
    }
    const auto s = daqc_schedule(Couplings::synthetic3(), h, 0.2);
    const double f = gate_fidelity(expm_hermitian(dense(h), 0.2), daqc_unitary(s));
    std::ostringstream d;
    d << "infidelity " << 1.0 - f << " over " << s.segments.size() << " segments";
    out.push_back({"daqc round trip 551", 1.0 - f <= 1e-9, d.str()});
  }
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n) {
      for (int trial = 0; trial < 5; ++trial) {
        Couplings cp = Couplings::from_pairs(n, {});
        ZPolynomial h(n);
        for (int i = 0; i < n; ++i) {
          for (int k = i + 1; k < n; ++k) {
            const double j = (u(rng) >= 0 ? 1 : -1) * (20.0 + 100.0 * std::abs(u(rng)));
            cp.j_hz(i, k) = cp.j_hz(k, i) = j;
            h.add(qubit_mask(n, i) | qubit_mask(n, k), u(rng));
          }
        }
        const auto s = daqc_schedule(cp, h, 0.2);
        worst = std::max(worst, 1.0 - gate_fidelity(expm_hermitian(dense(h), 0.2), daqc_unitary(s)));
      }
    }
    std::ostringstream d;
    d << "worst infidelity " << worst;
    out.push_back({"daqc round trip random 2-4 qubits", worst <= 1e-9, d.str()});
  }
  return out;
}

inline int cmd_verify(const std::string& catalog_path, std::ostream& out, std::ostream& err) {
  std::vector<CatalogEntry> catalog;
  try {
    catalog = catalog_path.empty() ? builtin_catalog() : read_catalog_file(catalog_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  try {
    const auto results = verify_suite(catalog);
    bool all = true;
    for (const auto& r : results) {
      out << (r.pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(44) << r.name << "  " << r.detail << "\n";
      all = all && r.pass;
    }
    out << (all ? "all checks passed" : "some checks failed") << "\n";
    return all ? kOk : kClaimFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kClaimFailed;
  }
}

}  // namespace falqon::cli
