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

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "falqon/baselines.hpp"
#include "falqon/catalog.hpp"
#include "falqon/daqc.hpp"
#include "falqon/falqon.hpp"

namespace falqon {

using json = nlohmann::ordered_json;

inline constexpr int kCatalogFormatVersion = 1;

/// Shortest round-trip decimal form, locale independent.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- schema helpers ----------------------------------------------------------

namespace detail {

inline const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing key '" + key + "'");
  return *it;
}

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw SchemaError(where + ": unknown key '" + k + "'");
  }
}

template <typename T>
T get_as(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(where + ": wrong value type");
  }
}

}  // namespace detail

// --- ZPolynomial / PauliSum ----------------------------------------------------

/// {"n_qubits": 3, "terms": [{"mask": "110", "coeff": 0.25}, ...]}; mask
/// characters are qubits 1..n.
inline json to_json(const ZPolynomial& h) {
  json terms = json::array();
  for (const auto& [mask, coeff] : h.terms()) terms.push_back({{"mask", bitstring(mask, h.n_qubits())}, {"coeff", coeff}});
  return {{"n_qubits", h.n_qubits()}, {"terms", terms}};
}

inline ZPolynomial zpoly_from_json(const json& j, const std::string& where = "hamiltonian") {
  detail::reject_unknown(j, {"n_qubits", "terms"}, where);
  const int n = detail::get_as<int>(detail::require(j, "n_qubits", where), where + ".n_qubits");
  if (n < 1 || n > 63) throw SchemaError(where + ".n_qubits out of range");
  const auto& terms = detail::require(j, "terms", where);
  if (!terms.is_array()) throw SchemaError(where + ".terms must be an array");
  ZPolynomial h(n);
  for (const auto& t : terms) {
    detail::reject_unknown(t, {"mask", "coeff"}, where + ".terms[]");
    const auto mask = detail::get_as<std::string>(detail::require(t, "mask", where), where + ".mask");
    if (static_cast<int>(mask.size()) != n) throw SchemaError(where + ": mask length differs from n_qubits");
    const double c = detail::get_as<double>(detail::require(t, "coeff", where), where + ".coeff");
    try {
      h.add(parse_bitstring(mask), c);
    } catch (const InvalidInput& e) {
      throw SchemaError(where + ": " + e.what());
    }
  }
  return h;
}

/// {"n_qubits": 2, "terms": [{"pauli": "YZ", "coeff": -0.5}, ...]}.
inline json to_json(const PauliSum& c) {
  json terms = json::array();
  const int n = c.n_qubits();
  for (const auto& t : c.terms()) {
    std::string s(static_cast<std::size_t>(n), 'I');
    for (int q = 0; q < n; ++q) {
      const Mask b = qubit_mask(n, q);
      if (t.x & b) s[static_cast<std::size_t>(q)] = 'X';
      if (t.y & b) s[static_cast<std::size_t>(q)] = 'Y';
      if (t.z & b) s[static_cast<std::size_t>(q)] = 'Z';
    }
    terms.push_back({{"pauli", s}, {"coeff", t.coeff}});
  }
  return {{"n_qubits", n}, {"terms", terms}};
}

// --- decoding rules and catalog -------------------------------------------------

inline json to_json(const DecodingRule& r) {
  auto bits = [](const std::vector<BitSource>& src) {
    json a = json::array();
    for (const auto& b : src) a.push_back({{"qubit", b.qubit + 1}, {"complement", b.complement}});
    return a;
  };
  return {{"n_qubits", r.n_qubits}, {"l_p", r.l_p}, {"l_q", r.l_q}, {"p_bits", bits(r.p_bits)}, {"q_bits", bits(r.q_bits)}};
}

inline DecodingRule rule_from_json(const json& j, const std::string& where = "decoding_rule") {
  detail::reject_unknown(j, {"n_qubits", "l_p", "l_q", "p_bits", "q_bits"}, where);
  DecodingRule r;
  r.n_qubits = detail::get_as<int>(detail::require(j, "n_qubits", where), where);
  r.l_p = detail::get_as<int>(detail::require(j, "l_p", where), where);
  r.l_q = detail::get_as<int>(detail::require(j, "l_q", where), where);
  auto bits = [&](const char* key, int l) {
    std::vector<BitSource> out;
    const auto& a = detail::require(j, key, where);
    if (!a.is_array() || static_cast<int>(a.size()) != l - 2) throw SchemaError(where + "." + key + ": expected l-2 entries");
    for (const auto& b : a) {
      detail::reject_unknown(b, {"qubit", "complement"}, where);
      const int q = detail::get_as<int>(detail::require(b, "qubit", where), where) - 1;
      if (q < 0 || q >= r.n_qubits) throw SchemaError(where + ": qubit out of range");
      out.push_back({q, detail::get_as<bool>(detail::require(b, "complement", where), where)});
    }
    return out;
  };
  if (r.l_p < 2 || r.l_q < 2 || r.l_p > 62 || r.l_q > 62) throw SchemaError(where + ": bit lengths out of range");
  r.p_bits = bits("p_bits", r.l_p);
  r.q_bits = bits("q_bits", r.l_q);
  return r;
}

inline json catalog_to_json(const std::vector<CatalogEntry>& catalog) {
  json entries = json::array();
  for (const auto& e : catalog) {
    entries.push_back({{"n", e.n},
                       {"variant", to_string(e.variant)},
                       {"n_qubits", e.hamiltonian.n_qubits()},
                       {"hamiltonian", to_json(e.hamiltonian)},
                       {"decoding_rule", to_json(e.rule)},
                       {"factors", {e.factors.first, e.factors.second}},
                       {"note", e.note}});
  }
  return {{"format", "falqon-catalog"}, {"version", kCatalogFormatVersion}, {"entries", entries}};
}

inline std::vector<CatalogEntry> catalog_from_json(const json& j) {
  detail::reject_unknown(j, {"format", "version", "entries"}, "catalog");
  if (detail::require(j, "format", "catalog") != "falqon-catalog") throw SchemaError("catalog: wrong format tag");
  if (detail::require(j, "version", "catalog") != kCatalogFormatVersion) throw SchemaError("catalog: unsupported version");
  const auto& entries = detail::require(j, "entries", "catalog");
  if (!entries.is_array() || entries.empty()) throw SchemaError("catalog: entries must be a non-empty array");
  std::vector<CatalogEntry> out;
  for (const auto& e : entries) {
    const std::string where = "catalog.entries[" + std::to_string(out.size()) + "]";
    detail::reject_unknown(e, {"n", "variant", "n_qubits", "hamiltonian", "decoding_rule", "factors", "note"}, where);
    CatalogEntry c;
    c.n = detail::get_as<std::uint64_t>(detail::require(e, "n", where), where + ".n");
    try {
      c.variant = parse_variant(detail::get_as<std::string>(detail::require(e, "variant", where), where));
    } catch (const InvalidInput& ex) {
      throw SchemaError(where + ": " + ex.what());
    }
    c.hamiltonian = zpoly_from_json(detail::require(e, "hamiltonian", where), where + ".hamiltonian");
    if (detail::get_as<int>(detail::require(e, "n_qubits", where), where) != c.hamiltonian.n_qubits()) {
      throw SchemaError(where + ": n_qubits disagrees with the Hamiltonian");
    }
    c.rule = rule_from_json(detail::require(e, "decoding_rule", where), where + ".decoding_rule");
    if (c.rule.n_qubits != c.hamiltonian.n_qubits()) throw SchemaError(where + ": rule and Hamiltonian sizes differ");
    const auto f = detail::get_as<std::vector<std::uint64_t>>(detail::require(e, "factors", where), where + ".factors");
    if (f.size() != 2) throw SchemaError(where + ".factors must have two entries");
    c.factors = {f[0], f[1]};
    if (e.contains("note")) c.note = detail::get_as<std::string>(e["note"], where + ".note");
    out.push_back(std::move(c));
  }
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  if (ss.str().find_first_not_of(" \t\r\n") == std::string::npos) throw SchemaError(path + ": empty file");
  try {
    return json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline std::vector<CatalogEntry> read_catalog_file(const std::string& path) {
  return catalog_from_json(read_json_file(path));
}

// --- schedules and states ---------------------------------------------------------

inline json mask_qubits(Mask m, int n) {
  json a = json::array();
  for (int q = 0; q < n; ++q) {
    if (m & qubit_mask(n, q)) a.push_back(q + 1);
  }
  return a;
}

inline json to_json(const DaqcSchedule& s) {
  const int n = s.n_qubits;
  json jm = json::array();
  for (int i = 0; i < s.couplings.n_qubits(); ++i) {
    json row = json::array();
    for (int k = 0; k < s.couplings.n_qubits(); ++k) row.push_back(s.couplings.j_hz(i, k));
    jm.push_back(row);
  }
  json segs = json::array();
  for (const auto& seg : s.segments) {
    segs.push_back({{"pulses_before", mask_qubits(seg.pulses_before, n)}, {"duration_s", seg.duration_s}});
  }
  return {{"n_qubits", n},
          {"J_hz", jm},
          {"offsets_hz", s.couplings.offsets_hz},
          {"offsets_enabled", s.couplings.offsets_enabled},
          {"segments", segs},
          {"closing_pulses", mask_qubits(s.closing_pulses, n)},
          {"total_time_s", s.total_time()}};
}

inline json to_json(const QuantumState& s) {
  json out = {{"n_qubits", s.n_qubits()}};
  if (s.backend() == Backend::pure) {
    out["backend"] = "pure";
    json amps = json::array();
    for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
      amps.push_back({s.amplitudes()(i).real(), s.amplitudes()(i).imag()});
    }
    out["amplitudes"] = amps;
  } else {
    out["backend"] = s.deviation_mode() ? "deviation" : "mixed";
    if (s.deviation_mode()) out["kappa"] = s.kappa();
    out["diagonal"] = s.diagonal_weights();
  }
  return out;
}

inline RampSchedule ramp_from_json(const json& j) {
  detail::reject_unknown(j, {"steps", "dt", "s"}, "ramp");
  const double dt = detail::get_as<double>(detail::require(j, "dt", "ramp"), "ramp.dt");
  RampSchedule r;
  if (j.contains("s")) {
    r.dt = dt;
    r.s = detail::get_as<std::vector<double>>(j["s"], "ramp.s");
    if (j.contains("steps") && j["steps"] != r.s.size()) throw SchemaError("ramp: steps disagrees with s");
  } else {
    r = RampSchedule::linear(detail::get_as<int>(detail::require(j, "steps", "ramp"), "ramp.steps"), dt);
  }
  try {
    r.validate();
  } catch (const InvalidInput& e) {
    throw SchemaError(std::string("ramp: ") + e.what());
  }
  return r;
}

inline QaoaSchedule qaoa_from_json(const json& j) {
  detail::reject_unknown(j, {"layers", "linear_ramp"}, "qaoa");
  QaoaSchedule q;
  if (j.contains("linear_ramp")) {
    const auto& lr = j["linear_ramp"];
    detail::reject_unknown(lr, {"layers", "dt"}, "qaoa.linear_ramp");
    try {
      q = QaoaSchedule::linear_ramp(detail::get_as<int>(detail::require(lr, "layers", "qaoa.linear_ramp"), "qaoa"),
                                    detail::get_as<double>(detail::require(lr, "dt", "qaoa.linear_ramp"), "qaoa"));
    } catch (const InvalidInput& e) {
      throw SchemaError(std::string("qaoa: ") + e.what());
    }
    if (j.contains("layers")) throw SchemaError("qaoa: give either layers or linear_ramp");
    return q;
  }
  const auto& layers = detail::require(j, "layers", "qaoa");
  if (!layers.is_array()) throw SchemaError("qaoa.layers must be an array");
  for (const auto& l : layers) {
    detail::reject_unknown(l, {"gamma", "beta"}, "qaoa.layers[]");
    q.layers.emplace_back(detail::get_as<double>(detail::require(l, "gamma", "qaoa.layers[]"), "qaoa.gamma"),
                          detail::get_as<double>(detail::require(l, "beta", "qaoa.layers[]"), "qaoa.beta"));
  }
  try {
    q.validate();
  } catch (const InvalidInput& e) {
    throw SchemaError(std::string("qaoa: ") + e.what());
  }
  return q;
}

inline json to_json(const QaoaSchedule& q) {
  json layers = json::array();
  for (const auto& [g, b] : q.layers) layers.push_back({{"gamma", g}, {"beta", b}});
  return {{"layers", layers}};
}

// --- trajectories -------------------------------------------------------------------

/// Column order: iter, beta, energy, p_sol, beta_deg, commutator, then one
/// prob_<label> column per basis state when probabilities were recorded.
inline std::string trajectory_csv(const TrajectoryRecord& rec) {
  std::ostringstream os;
  const bool probs = !rec.rows.empty() && !rec.rows.front().probs.empty();
  os << "iter,beta,energy,p_sol,beta_deg,commutator";
  if (probs) {
    for (Index m = 0; m < dimension(rec.n_qubits); ++m) os << ",prob_" << bitstring(m, rec.n_qubits);
  }
  os << '\n';
  for (std::size_t r = 0; r < rec.rows.size(); ++r) {
    const auto& row = rec.rows[r];
    os << row.iter << ',' << format_double(row.beta) << ',' << format_double(row.energy) << ','
       << format_double(row.p_sol) << ',' << format_double(rec.beta_degrees(r)) << ',' << format_double(row.commutator);
    if (probs) {
      for (double p : row.probs) os << ',' << format_double(p);
    }
    os << '\n';
  }
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

}  // namespace falqon
