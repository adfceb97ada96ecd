// Copyright 2026 The polariq Authors
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

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "polariq/config.hpp"
#include "polariq/output.hpp"
#include "polariq/scenario.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 2, kContractViolation = 3, kConvergenceFailure = 4 };

struct Options {
  std::string scenario;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> cutoff;
  std::optional<std::size_t> trajectories;
  std::optional<double> branch_threshold;
  std::optional<std::string> out;
  bool plot_script = false;
  bool convergence = false;
  bool quiet = false;
};

polariq::ScenarioConfig build_config(const Options& o) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.config_path.empty()) doc = polariq::load_config_document(o.config_path);
  if (!o.scenario.empty()) {
    if (doc.contains("scenario") && doc["scenario"] != o.scenario) {
      throw polariq::ConfigError("--scenario " + o.scenario + " conflicts with the config file's scenario " +
                                 doc["scenario"].dump());
    }
    doc["scenario"] = o.scenario;
  }
  if (!doc.contains("scenario")) throw polariq::ConfigError("give --scenario or a config file with a scenario key");
  auto c = polariq::config_from_json(doc);
  if (o.seed) c.engine.seed = *o.seed;
  if (o.cutoff) c.engine.cutoff = *o.cutoff;
  if (o.trajectories) c.engine.trajectories = *o.trajectories;
  if (o.branch_threshold) c.engine.branch_threshold = *o.branch_threshold;
  if (o.out) c.output.dir = *o.out;
  if (o.plot_script) c.output.emit_plot_script = true;
  if (o.convergence) c.convergence.enabled = true;
  polariq::validate(c);
  return c;
}

int run(const Options& o) {
  const auto config = build_config(o);
  const auto result = polariq::run_scenario(config);
  const auto files = polariq::write_outputs(config.output.dir, config, result, config.output.emit_plot_script);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (!o.quiet) {
    for (const auto& f : files) std::cout << f.string() << '\n';
    std::printf("%s: %zu table(s) in %.2f s\n", polariq::to_string(config.kind).c_str(), result.tables.size(),
                result.wall_seconds);
  }

  int code = kOk;
  if (result.contract_violation) {
    std::cerr << "error: at least one row violates a numerical contract (see the status column)\n";
    code = kContractViolation;
  }
  if (config.convergence.enabled) {
    if (config.engine.cutoff < 3) throw polariq::ConfigError("convergence check needs a cutoff of at least 3");
    auto low_config = config;
    low_config.engine.cutoff -= 2;
    const auto low = polariq::run_scenario(low_config);
    const auto rep = polariq::compare_results(result, low, config.convergence.tolerance);
    std::printf("convergence N=%d vs N=%d: max |dn| = %s, max |dg2| = %s, tolerance %s: %s\n", config.engine.cutoff,
                low_config.engine.cutoff, polariq::format_double(rep.max_delta_n).c_str(),
                polariq::format_double(rep.max_delta_g2).c_str(), polariq::format_double(rep.tolerance).c_str(),
                rep.passed ? "pass" : "fail");
    if (!rep.passed && code == kOk) code = kConvergenceFailure;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runs polariton quantum-circuit scenarios and writes CSV/JSON result tables."};
  Options o;
  app.add_option("--scenario", o.scenario,
                 "mzi_free_space, mzi_theta_phi_map, mzi_lossy, mzi_integrated, qpic_kscan, qpic_slowlight or "
                 "qpic_phase_sweep");
  app.add_option("--config", o.config_path, "Scenario file (.toml-style or .json)");
  app.add_option("--seed", o.seed, "Master seed for sampled runs");
  app.add_option("--cutoff", o.cutoff, "Fock cutoff N (max photons per mode)");
  app.add_option("--trajectories", o.trajectories, "Trajectories per point for sampled runs");
  app.add_option("--branch-threshold", o.branch_threshold, "Pruning threshold for branch enumeration");
  app.add_option("--out", o.out, "Output directory");
  app.add_flag("--emit-plot-script", o.plot_script, "Also write a matplotlib script");
  app.add_flag("--convergence-check", o.convergence, "Rerun at N-2 and compare");
  app.add_flag("-q,--quiet", o.quiet, "Only print warnings and errors");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return run(o);
  } catch (const polariq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const polariq::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kContractViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
