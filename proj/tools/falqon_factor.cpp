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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "falqon/cli.hpp"

namespace fc = falqon::cli;

int main(int argc, char** argv) {
  CLI::App app{"Factor integers with feedback-based quantum optimization on a simulated register"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(falqon::kVersion));

  // encode
  fc::EncodeOptions enc;
  std::string enc_variant = "full";
  auto* encode = app.add_subcommand("encode", "Print the diagonal cost Hamiltonian for an odd integer");
  encode->add_option("n,--n", enc.n, "odd integer >= 9")->required();
  bool generic = false;
  auto* catalog_flag = encode->add_flag("--catalog", enc.catalog, "use the built-in catalog entry");
  encode->add_flag("--generic", generic, "compile from the multiplication table (default)")->excludes(catalog_flag);
  encode->add_option("--variant", enc_variant, "catalog variant")->check(CLI::IsMember({"full", "truncated"}));
  encode->add_option("--lp", enc.l_p, "bit length of p");
  encode->add_option("--lq", enc.l_q, "bit length of q");
  encode->add_flag("--all-splits", enc.all_splits, "encode every (l_p, l_q) split");
  encode->add_option("-o,--output-dir", enc.output_dir, "output directory");

  // config-driven commands share the same options
  struct Common {
    std::string config;
    std::string output_dir;
    std::optional<std::uint64_t> n, seed;
    std::optional<int> jobs;
    std::optional<std::string> variant, algorithm;
  };
  auto add_common = [&app](const char* name, const char* help, Common& c) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", c.config, "JSON config or a previous run manifest")->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", c.output_dir, "output directory");
    sub->add_option("-n,--number", c.n, "integer to factor");
    sub->add_option("--seed", c.seed, "noise seed");
    sub->add_option("-j,--jobs", c.jobs, "worker threads (0 = all cores)");
    sub->add_option("--variant", c.variant, "catalog variant")->check(CLI::IsMember({"full", "truncated"}));
    sub->add_option("-a,--algorithm", c.algorithm, "falqon, adiabatic or qaoa")
        ->check(CLI::IsMember({"falqon", "adiabatic", "qaoa"}));
    return sub;
  };
  Common factor_opts, noise_opts, rfi_opts, step_opts;
  auto* factor = add_common("factor", "Run one trajectory and report the factors", factor_opts);
  auto* sweep_noise = add_common("sweep-noise", "Noise robustness sweep over seeds and algorithms", noise_opts);
  auto* sweep_rfi = add_common("sweep-rfi", "RF amplitude and inhomogeneity sweep with DAQC", rfi_opts);
  auto* sweep_step = add_common("sweep-stepsize", "Step-size variance sweep under flip errors", step_opts);

  std::string verify_catalog;
  auto* verify = app.add_subcommand("verify", "Check catalog, tomography and DAQC against oracles");
  verify->add_option("--catalog", verify_catalog, "catalog JSON file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fc::kUsage;
  }

  auto load = [](const Common& c) {
    fc::RunConfig cfg = fc::load_config(c.config);
    if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
    if (c.n) cfg.instance.n = *c.n;
    if (c.seed) cfg.noise.seed = *c.seed;
    if (c.jobs) cfg.jobs = *c.jobs;
    if (c.variant) cfg.instance.variant = falqon::parse_variant(*c.variant);
    if (c.algorithm) cfg.algorithm = *c.algorithm;
    return cfg;
  };
  auto run = [&](const Common& c, auto&& fn) {
    try {
      return fn(load(c), std::cout, std::cerr);
    } catch (const falqon::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return static_cast<int>(fc::kUsage);
    }
  };

  if (*encode) {
    enc.variant = falqon::parse_variant(enc_variant);
    return fc::cmd_encode(enc, std::cout, std::cerr);
  }
  if (*factor) return run(factor_opts, fc::cmd_factor);
  if (*sweep_noise) return run(noise_opts, fc::cmd_sweep_noise);
  if (*sweep_rfi) return run(rfi_opts, fc::cmd_sweep_rfi);
  if (*sweep_step) return run(step_opts, fc::cmd_sweep_stepsize);
  if (*verify) return fc::cmd_verify(verify_catalog, std::cout, std::cerr);
  return fc::kUsage;
}
