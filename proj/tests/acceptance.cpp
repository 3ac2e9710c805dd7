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


// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria, capped at 1.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "falqon/cli.hpp"
#include "oracles.hpp"

using namespace falqon;

namespace {

// Tolerances and thresholds.
constexpr double kExact = 1e-12;
constexpr double kUptick = 1e-3;
constexpr double kStrictUptick = 1e-6;
constexpr double kTomography = 1e-10;
constexpr double kReconstruction = 1e-12;
constexpr double kDaqcInfidelity = 1e-9;
constexpr double kRegression = 1e-9;
constexpr double kFinalEnergy551 = -0.7480017356265103;
constexpr double kFinalPsol551 = 0.9980017356265105;
constexpr double kMaxSecondsPerLargeRun = 10.0;
constexpr double kMaxSecondsCatalog = 1.0;
constexpr double kMaxSecondsEncoder = 30.0;
struct LargeThreshold {
  std::uint64_t n;
  Variant variant;
  double min_p_sol;
};
constexpr LargeThreshold kLarge[] = {{9167, Variant::full, 0.95},
                                     {9167, Variant::truncated, 0.95},
                                     {2106287, Variant::full, 0.70},
                                     {2106287, Variant::truncated, 0.50}};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

Problem problem_for(std::uint64_t n, Variant v) {
  const auto [h, rule] = catalog_hamiltonian(n, v);
  return Problem::make(h, default_drive_weights(h.n_qubits()), solution_states(rule, n), rule, n);
}

oracle::Mat kron_hamiltonian(const ZPolynomial& h) {
  const int n = h.n_qubits();
  oracle::Mat out = oracle::Mat::Zero(1 << n, 1 << n);
  for (const auto& [mask, c] : h.terms()) {
    std::string s(static_cast<std::size_t>(n), 'I');
    for (int label : h.labels(mask)) s[static_cast<std::size_t>(label - 1)] = 'Z';
    out += c * oracle::pauli(s);
  }
  return out;
}

std::set<std::uint64_t> decoded(const std::vector<Index>& states, const DecodingRule& rule) {
  std::set<std::uint64_t> out;
  for (Index m : states) {
    const auto [p, q] = decode_factors(m, rule);
    out.insert(p);
    out.insert(q);
  }
  return out;
}

std::string scratch(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / "falqon_acceptance" / name;
  std::filesystem::remove_all(d);
  return d.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

Outcome catalog_spectrum() {
  const auto t0 = Clock::now();
  Outcome o;
  const auto e = find_entry(builtin_catalog(), 551, Variant::full);
  const auto diag = zpoly_diagonal(e.hamiltonian);
  int low = 0, high = 0;
  for (double d : diag) {
    if (std::abs(d + 0.75) <= kExact) ++low;
    if (std::abs(d - 0.25) <= kExact) ++high;
  }
  const auto g = brute_force_ground_states(e.hamiltonian);
  const auto f = decoded(g.states, e.rule);
  o.pass = low == 2 && high == 6 && f == std::set<std::uint64_t>{19, 29};
  const double t = seconds_since(t0);
  o.pass = o.pass && t < kMaxSecondsCatalog;
  o.detail = "-0.75 x" + std::to_string(low) + ", +0.25 x" + std::to_string(high) + ", factors {19, 29}";
  return o;
}

Outcome large_catalogs() {
  const auto t0 = Clock::now();
  Outcome o;
  const auto cat = builtin_catalog();
  const std::pair<std::uint64_t, std::set<std::uint64_t>> want[] = {{9167, {89, 103}}, {2106287, {1033, 2039}}};
  for (const auto& [n, factors] : want) {
    const auto& full = find_entry(cat, n, Variant::full);
    const auto& trunc = find_entry(cat, n, Variant::truncated);
    const auto gf = brute_force_ground_states(full.hamiltonian);
    const auto gt = brute_force_ground_states(trunc.hamiltonian);
    const bool same = gf.states == gt.states;
    const bool dec = decoded(gf.states, full.rule) == factors && decoded(gt.states, trunc.rule) == factors;
    o.pass = o.pass && same && dec;
    o.detail += std::to_string(n) + (same && dec ? " ok; " : " mismatch; ");
  }
  const double t = seconds_since(t0);
  o.pass = o.pass && t < kMaxSecondsCatalog;
  o.detail += "time " + std::to_string(t) + " s";
  return o;
}

Outcome encoder_soundness() {
  const auto t0 = Clock::now();
  Outcome o;
  int instances = 0, bad = 0;
  for (auto n : oracle::odd_biprimes(255)) {
    for (const auto& [lp, lq] : factor_splits(n)) {
      const auto inst = FactorInstance::make(n, lp, lq);
      const auto h = boolean_to_zpoly(build_cost(inst), inst.layout(), inst.n_qubits());
      const auto truth = oracle::factorizations(n, lp, lq);
      if (truth.empty()) continue;
      ++instances;
      const auto g = brute_force_ground_states(h);
      std::set<std::pair<std::uint64_t, std::uint64_t>> got, want(truth.begin(), truth.end());
      for (Index m : g.states) got.insert(decode_factors(m, DecodingRule::from_instance(inst)));
      if (g.energy != 0.0 || got != want) ++bad;
    }
  }
  const double t = seconds_since(t0);
  o.pass = bad == 0 && instances > 0 && t < kMaxSecondsEncoder;
  o.detail = std::to_string(instances) + " instances, " + std::to_string(bad) + " wrong, time " +
             std::to_string(t) + " s";
  return o;
}

Outcome falqon_convergence() {
  Outcome o;
  const auto p = problem_for(551, Variant::full);
  const auto rec = run_falqon(p, plus_state(3), FalqonConfig{});
  double worst = -1.0;
  for (std::size_t j = 1; j < rec.rows.size(); ++j) worst = std::max(worst, rec.rows[j].energy - rec.rows[j - 1].energy);
  const auto& last = rec.rows.back();
  const bool gain = last.p_sol >= 2.0 * rec.rows[0].p_sol;
  const bool pinned = std::abs(last.energy - kFinalEnergy551) <= kRegression &&
                      std::abs(last.p_sol - kFinalPsol551) <= kRegression;

  FalqonConfig fine;
  fine.c = 0.05;
  fine.dt = 0.01;
  fine.max_iters = 400;
  const auto slow = run_falqon(p, plus_state(3), fine);
  double worst_fine = -1.0;
  for (std::size_t j = 1; j < slow.rows.size(); ++j) {
    worst_fine = std::max(worst_fine, slow.rows[j].energy - slow.rows[j - 1].energy);
  }
  o.pass = rec.rows.size() == 23 && worst <= kUptick && gain && pinned && worst_fine <= kStrictUptick;
  std::ostringstream d;
  d << "max uptick " << worst << ", p_sol " << rec.rows[0].p_sol << " -> " << last.p_sol << ", final E "
    << std::setprecision(16) << last.energy << std::setprecision(6) << ", fine max uptick " << worst_fine;
  o.detail = d.str();
  return o;
}

Outcome large_instances() {
  Outcome o;
  for (const auto& l : kLarge) {
    cli::RunConfig c;
    c.instance.n = l.n;
    c.instance.variant = l.variant;
    const auto r = cli::resolve(c);
    const auto t0 = Clock::now();
    const auto rec = run_falqon(r.problem, cli::initial_state(r), cli::falqon_config(r.config));
    const double t = seconds_since(t0);
    const auto& last = rec.rows.back();
    const auto [a, b] = top_two(last.probs);
    const std::set<Index> top{a, b}, sol(r.problem.solutions.begin(), r.problem.solutions.end());
    const bool ok = top == sol && last.p_sol >= l.min_p_sol && t <= kMaxSecondsPerLargeRun &&
                    rec.rows.size() == 301;
    o.pass = o.pass && ok;
    std::ostringstream d;
    d << l.n << "/" << to_string(l.variant) << " p_sol " << last.p_sol << " (" << t << " s)"
      << (ok ? "" : " FAIL") << "; ";
    o.detail += d.str();
  }
  return o;
}

Outcome measurement_equivalence() {
  Outcome o;
  double worst_exp = 0.0, worst_rec = 0.0;
  std::mt19937_64 rng(2026);
  for (const auto& e : builtin_catalog()) {
    const int n = e.hamiltonian.n_qubits();
    if (n > 5) continue;
    const auto w = default_drive_weights(n);
    const auto c = commutator_with_drive(e.hamiltonian, w);
    const auto groups = tomography_groups(c);
    for (int i = 0; i < 100; ++i) {
      const QuantumState s = i % 2 == 0 ? QuantumState::pure(oracle::random_pure(n, rng))
                                        : QuantumState::mixed(oracle::random_density(n, rng));
      const double direct = expectation_commutator(s, c, MeasurementMode::direct);
      const double tomo = expectation_commutator(s, c, MeasurementMode::tomography);
      worst_exp = std::max(worst_exp, std::abs(direct - tomo));
    }
    oracle::Mat sum = oracle::Mat::Zero(1 << n, 1 << n);
    for (const auto& g : groups) {
      const oracle::Mat r = oracle::expm(oracle::pauli(oracle::on(n, {g.qubit + 1}, 'X')), kPi / 4);
      sum += r * kron_hamiltonian(g.diagonal) * r.adjoint();
    }
    const oracle::Mat want = oracle::commutator_i(kron_hamiltonian(e.hamiltonian), oracle::drive(w));
    worst_rec = std::max(worst_rec, (sum - want).cwiseAbs().maxCoeff());
  }
  o.pass = worst_exp <= kTomography && worst_rec <= kReconstruction;
  std::ostringstream d;
  d << "max |direct - tomography| " << worst_exp << ", max reconstruction error " << worst_rec;
  o.detail = d.str();
  return o;
}

Outcome daqc_fidelity() {
  Outcome o;
  const auto h = find_entry(builtin_catalog(), 551, Variant::full).hamiltonian;
  const auto s = daqc_schedule(Couplings::synthetic3(), h, 0.2);
  const oracle::Mat target = oracle::expm(kron_hamiltonian(h), 0.2);
  const double inf = 1.0 - gate_fidelity(target, daqc_unitary(s));
  bool monotone = true;
  for (double nu1 : {1000.0, 2000.0, 5000.0, std::numeric_limits<double>::infinity()}) {
    double prev = 2.0;
    for (double rfi : {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3}) {
      const auto rf = RfModel::grid(nu1, rfi, 7);
      double f = 0.0;
      for (const auto& m : rf.members) f += m.weight * gate_fidelity(target, daqc_unitary(s, nu1, m.scale));
      monotone = monotone && f <= prev + 1e-12;
      prev = f;
    }
  }
  o.pass = inf <= kDaqcInfidelity && monotone;
  std::ostringstream d;
  d << "ideal infidelity " << inf << ", ensemble fidelity " << (monotone ? "non-increasing" : "NOT monotone")
    << " in rfi";
  o.detail = d.str();
  return o;
}

std::map<std::pair<double, double>, double> stepsize_variances(FlipError model, const std::string& dir) {
  cli::RunConfig c;
  c.noise.flip_error = model;
  c.output_dir = dir;
  std::ostringstream out, err;
  if (cli::cmd_sweep_stepsize(c, out, err) != cli::kOk) throw Error("sweep-stepsize failed: " + err.str());
  std::map<std::pair<double, double>, double> var;
  for (const auto& row : csv_rows(cli::join(dir, "stepsize_summary.csv"))) {
    var[{std::stod(row[0]), std::stod(row[1])}] = std::stod(row[4]);
  }
  return var;
}

Outcome stepsize_robustness() {
  Outcome o;
  const auto v = stepsize_variances(FlipError::relative, scratch("stepsize"));
  const double lo = v.at({0.25, 0.1}), hi = v.at({0.75, 0.1});
  o.pass = hi > lo && v.at({0.25, 0.0}) == 0.0 && v.at({0.75, 0.0}) == 0.0;
  std::ostringstream d;
  d << "var p_sol c=0.25: " << lo << ", c=0.75: " << hi << " (relative flip error)";
  const auto a = stepsize_variances(FlipError::additive, scratch("stepsize_additive"));
  d << "; additive model for reference: " << a.at({0.25, 0.1}) << " vs " << a.at({0.75, 0.1});
  o.detail = d.str();
  return o;
}

Outcome noise_sweep() {
  Outcome o;
  cli::RunConfig c;
  c.output_dir = scratch("noise");
  std::ostringstream out, err;
  if (cli::cmd_sweep_noise(c, out, err) != cli::kOk) return {false, "sweep-noise failed: " + err.str()};
  const auto p = problem_for(551, Variant::full);
  const auto ref = run_falqon(p, plus_state(3), FalqonConfig{});
  bool identical = true;
  int compared = 0;
  for (const auto& row : csv_rows(cli::join(c.output_dir, "noise_sweep.csv"))) {
    if (row[0] != "falqon" || std::stod(row[1]) != 0.0 || std::stod(row[2]) != 0.0) continue;
    const auto& r = ref.rows.at(static_cast<std::size_t>(std::stoi(row[4])));
    identical = identical && std::stod(row[5]) == r.beta && std::stod(row[6]) == r.energy &&
                std::stod(row[7]) == r.p_sol;
    ++compared;
  }
  std::map<std::string, std::vector<double>> means;
  int seeds = 0;
  for (const auto& row : csv_rows(cli::join(c.output_dir, "noise_summary.csv"))) {
    means[row[0]].push_back(std::stod(row[4]));
    seeds = std::stoi(row[3]);
  }
  bool monotone = true;
  std::ostringstream d;
  for (const auto& [alg, m] : means) {
    const bool up = std::is_sorted(m.begin(), m.end());
    monotone = monotone && up;
    d << alg << " " << m.front() << " -> " << m.back() << (up ? "" : " (not monotone)") << "; ";
  }
  o.pass = identical && compared == 20 * 23 && monotone && seeds >= 20;
  d << compared << " noiseless rows " << (identical ? "bit-identical" : "DIFFER");
  o.detail = d.str();
  return o;
}

bool same_files(const std::string& a, const std::string& b, std::initializer_list<const char*> files) {
  for (const char* f : files) {
    const auto x = slurp(cli::join(a, f));
    if (x.empty() || x != slurp(cli::join(b, f))) return false;
  }
  return true;
}

Outcome determinism() {
  Outcome o;
  std::ostringstream out, err, d;
  using Cmd = std::function<int(const cli::RunConfig&)>;
  struct Case {
    const char* name;
    Cmd run;
    cli::RunConfig cfg;
    std::initializer_list<const char*> files;
  };
  cli::RunConfig noisy;
  noisy.noise = {0.2, 0.2, 7, FlipError::relative};
  cli::RunConfig small_noise;
  small_noise.sweep.seeds = std::vector<std::uint64_t>{3, 4, 5};
  cli::RunConfig rfi;
  rfi.sweep.nu1_grid = {2000.0};
  rfi.sweep.rfi_grid = {0.0, 0.1};
  rfi.sweep.rfi_iters = 20;
  const Case cases[] = {
      {"factor", [&](const cli::RunConfig& c) { return cli::cmd_factor(c, out, err); }, noisy,
       {"trajectory.csv", "report.json"}},
      {"sweep-noise", [&](const cli::RunConfig& c) { return cli::cmd_sweep_noise(c, out, err); }, small_noise,
       {"noise_sweep.csv", "noise_summary.csv"}},
      {"sweep-stepsize", [&](const cli::RunConfig& c) { return cli::cmd_sweep_stepsize(c, out, err); },
       small_noise, {"stepsize_sweep.csv", "stepsize_summary.csv"}},
      {"sweep-rfi", [&](const cli::RunConfig& c) { return cli::cmd_sweep_rfi(c, out, err); }, rfi,
       {"rfi_sweep.csv", "daqc_schedule.json"}},
  };
  for (const auto& cs : cases) {
    cli::RunConfig first = cs.cfg;
    first.output_dir = scratch(std::string(cs.name) + "_a");
    const int rc1 = cs.run(first);
    auto again = cli::load_config(cli::join(first.output_dir, "manifest.json"));
    again.output_dir = scratch(std::string(cs.name) + "_b");
    again.jobs = 1;
    const int rc2 = cs.run(again);
    const bool ok = rc1 == rc2 && rc1 != cli::kUsage && same_files(first.output_dir, again.output_dir, cs.files);
    o.pass = o.pass && ok;
    d << cs.name << (ok ? " identical; " : " DIFFERS; ");
  }
  cli::EncodeOptions e;
  e.n = 25;
  e.output_dir = scratch("encode_a");
  cli::cmd_encode(e, out, err);
  const std::string first = e.output_dir;
  e.output_dir = scratch("encode_b");
  cli::cmd_encode(e, out, err);
  const bool enc = same_files(first, e.output_dir, {"encode_25_generic.json", "encode_25_generic.txt"});
  o.pass = o.pass && enc;
  d << "encode " << (enc ? "identical" : "DIFFERS");
  o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"catalog spectrum 551", catalog_spectrum},
      {"large catalogs", large_catalogs},
      {"generic encoder soundness", encoder_soundness},
      {"falqon convergence 551", falqon_convergence},
      {"large-instance falqon", large_instances},
      {"measurement equivalence", measurement_equivalence},
      {"daqc fidelity", daqc_fidelity},
      {"step-size robustness", stepsize_robustness},
      {"noise sweep", noise_sweep},
      {"determinism", determinism},
  };
  int failed = 0;
  int k = 0;
  for (const auto& [name, check] : criteria) {
    ++k;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2d %-28s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", k - failed, k);
  return failed == 0 ? 0 : 1;
}
