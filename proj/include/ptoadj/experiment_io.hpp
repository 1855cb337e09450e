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

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptoadj/simulation.hpp"

namespace ptoadj {

inline constexpr const char* kToolName = "ptoadj";
inline constexpr const char* kToolVersion = "0.1.0";
/// Named random pipeline, part of the config digest: regenerating a CSV
/// requires this exact generator/transform pair.
inline constexpr const char* kRngTag = "philox4x32-10+as241";

/// Parse failure with file position, for line/field diagnostics.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message) {}
};

struct NamedExperiment {
  std::string name;  // section name; empty for a single unnamed experiment
  ExperimentConfig config;
};

/// Flat key=value format with '#' comments and optional [section] blocks,
/// one experiment per section. `preset = <name>` loads a named default
/// configuration that later keys override.
std::vector<NamedExperiment> parse_config_text(const std::string& text,
                                               const std::string& filename);
std::vector<NamedExperiment> parse_config_file(const std::string& path);

/// Named default configurations for the benchmark figures; each figure has
/// four panels over its (theta, noise) pairs.
std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);
/// Panel presets belonging to one figure id (fig2, fig3, fig4).
std::vector<std::string> figure_panels(const std::string& figure);

/// Canonical serialization of everything that influences emitted numbers
/// (model, parameters, grids, seed, policies, tool version, RNG tag).
std::string canonical_config_string(const ExperimentConfig& config);

/// FNV-1a 64-bit digest of the canonical serialization, as 16 hex chars.
std::string config_digest(const ExperimentConfig& config);

/// CSV with header n,pto,... where improvement columns follow the policy
/// list (PTO itself feeds the `pto` relative-performance column). Period
/// decimals, '\n' newlines, 10 significant digits.
std::string format_csv(const ExperimentConfig& config,
                       const std::vector<MetricsRecord>& records);

/// Sidecar JSON describing a finished run: digest, seed, resolved config.
std::string format_manifest(const ExperimentConfig& config, const std::string& config_path,
                            const std::string& csv_path);

/// Locale-independent value formatting used for all CSV payloads.
std::string format_double(double value);

}  // namespace ptoadj
