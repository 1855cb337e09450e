// Copyright 2026 ptoadj contributors
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

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ptoadj/checks.hpp"
#include "ptoadj/experiment_io.hpp"
#include "ptoadj/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitIoError = 3;

int env_default_threads() {
  if (const char* env = std::getenv("PTOADJ_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // library default (all available)
}

void write_file_or_throw(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

/// Runs one experiment and writes CSV plus manifest sidecar.
void run_and_emit(const ptoadj::ExperimentConfig& config, const std::string& config_path,
                  const std::string& out_path, int threads) {
  std::cout << "running " << config.n_grid.size() << " sample sizes x "
            << config.replications << " replications -> " << out_path << "\n";
  const std::vector<ptoadj::MetricsRecord> records =
      ptoadj::run_experiment(config, ptoadj::ExecutionMode::kParallel, threads);
  for (const ptoadj::MetricsRecord& record : records) {
    std::cout << "  n=" << record.n
              << " pto_relative=" << ptoadj::format_double(record.pto_relative)
              << " truncation_rate=" << ptoadj::format_double(record.truncation_rate)
              << "\n";
  }
  write_file_or_throw(out_path, ptoadj::format_csv(config, records));
  write_file_or_throw(out_path + ".manifest.json",
                      ptoadj::format_manifest(config, config_path, out_path));
}

std::string with_section_suffix(const std::string& out_path, const std::string& section) {
  if (section.empty()) return out_path;
  const auto dot = out_path.rfind('.');
  if (dot == std::string::npos || out_path.find('/', dot) != std::string::npos) {
    return out_path + "_" + section;
  }
  return out_path.substr(0, dot) + "_" + section + out_path.substr(dot);
}

int cmd_run(const std::string& config_path, const std::string& out_path, double reps,
            long long seed, int threads) {
  std::vector<ptoadj::NamedExperiment> experiments;
  try {
    experiments = ptoadj::parse_config_file(config_path);
  } catch (const ptoadj::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  try {
    const bool multi = experiments.size() > 1;
    for (ptoadj::NamedExperiment& experiment : experiments) {
      if (reps > 0) experiment.config.replications = static_cast<int>(std::llround(reps));
      if (seed >= 0) experiment.config.seed = static_cast<std::uint64_t>(seed);
      const std::string path =
          multi ? with_section_suffix(out_path, experiment.name) : out_path;
      run_and_emit(experiment.config, config_path, path, threads);
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}

int cmd_verify(const std::string& scope) {
  std::vector<ptoadj::CheckResult> results;
  const auto append = [&results](std::vector<ptoadj::CheckResult> more) {
    results.insert(results.end(), more.begin(), more.end());
  };
  if (scope == "constants" || scope == "all") append(ptoadj::constant_checks());
  if (scope == "gaps" || scope == "all") append(ptoadj::gap_checks());
  if (scope == "multi" || scope == "all") append(ptoadj::multi_checks());
  if (results.empty()) {
    std::cerr << "unknown scope '" << scope << "' (constants|gaps|multi|all)\n";
    return kExitBadInput;
  }
  int failures = 0;
  for (const ptoadj::CheckResult& r : results) {
    std::printf("%-48s measured=%-14.8g expected=%-12.8g tol=%-8.2g %s\n", r.name.c_str(),
                r.measured, r.expected, r.tolerance, r.pass ? "PASS" : "FAIL");
    if (!r.pass) ++failures;
  }
  if (failures > 0) {
    std::cerr << failures << " check(s) failed\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_reproduce(const std::string& figure, double reps, long long seed,
                  const std::string& out_dir, int threads) {
  std::vector<std::string> panels;
  try {
    panels = ptoadj::figure_panels(figure);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  try {
    std::filesystem::create_directories(out_dir);
    for (const std::string& panel : panels) {
      ptoadj::ExperimentConfig config = ptoadj::preset_config(panel);
      if (reps > 0) config.replications = static_cast<int>(std::llround(reps));
      if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
      const std::string out_path = out_dir + "/" + panel + ".csv";
      run_and_emit(config, "preset:" + panel, out_path, threads);
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-estimation price adjustment simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path = "results.csv";
  std::string scope = "all";
  std::string figure;
  std::string out_dir = ".";
  double reps = -1.0;
  long long seed = -1;
  int threads = env_default_threads();

  CLI::App* run = app.add_subcommand("run", "run an experiment config and emit CSV");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out", out_path, "output CSV path");
  run->add_option("--reps", reps, "override replication count (accepts 1e4 style)");
  run->add_option("--seed", seed, "override RNG seed");
  run->add_option("--threads", threads, "worker thread cap (0 = all)");

  CLI::App* verify = app.add_subcommand("verify", "run built-in numerical self-checks");
  verify->add_option("--scope", scope, "constants|gaps|multi|all");

  CLI::App* reproduce =
      app.add_subcommand("reproduce", "run all four panels of a benchmark figure");
  reproduce->add_option("figure", figure, "fig2|fig3|fig4")->required();
  reproduce->add_option("--reps", reps, "replications per panel (accepts 1e4 style)");
  reproduce->add_option("--seed", seed, "override RNG seed");
  reproduce->add_option("--out", out_dir, "output directory");
  reproduce->add_option("--threads", threads, "worker thread cap (0 = all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitBadInput;
  }

  if (run->parsed()) return cmd_run(config_path, out_path, reps, seed, threads);
  if (verify->parsed()) return cmd_verify(scope);
  return cmd_reproduce(figure, reps, seed, out_dir, threads);
}
