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

#include "ptoadj/experiment_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ptoadj {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_number(const std::string& file, int line, const std::string& key,
                    const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(file, line, "key '" + key + "': cannot parse number '" + value + "'");
  }
}

std::vector<int> parse_n_grid(const std::string& file, int line, const std::string& value) {
  std::vector<int> grid;
  if (value.find(':') != std::string::npos) {
    const auto parts = split(value, ':');
    if (parts.size() != 3) {
      throw ConfigError(file, line, "n_grid range must be lo:hi:step");
    }
    const int lo = static_cast<int>(parse_number(file, line, "n_grid", parts[0]));
    const int hi = static_cast<int>(parse_number(file, line, "n_grid", parts[1]));
    const int step = static_cast<int>(parse_number(file, line, "n_grid", parts[2]));
    if (step <= 0 || hi < lo) throw ConfigError(file, line, "bad n_grid range");
    for (int n = lo; n <= hi; n += step) grid.push_back(n);
  } else {
    for (const std::string& item : split(value, ',')) {
      if (item.empty()) continue;
      grid.push_back(static_cast<int>(parse_number(file, line, "n_grid", item)));
    }
  }
  if (grid.empty()) throw ConfigError(file, line, "n_grid is empty");
  return grid;
}

std::vector<AdjustmentPolicy> parse_policies(const std::string& file, int line,
                                             const std::string& value) {
  std::vector<AdjustmentPolicy> policies;
  for (const std::string& item : split(value, ',')) {
    AdjustmentPolicy policy;
    if (item == "pto") {
      policy = AdjustmentPolicy::pto();
    } else if (item == "oracle") {
      policy = AdjustmentPolicy::oracle();
    } else if (item == "plugin" || item == "dd") {
      policy = AdjustmentPolicy::plugin();
    } else if (item == "bootstrap" || item == "boot") {
      policy = AdjustmentPolicy::bootstrap();
    } else {
      throw ConfigError(file, line, "unknown policy '" + item + "'");
    }
    for (const AdjustmentPolicy& seen : policies) {
      if (seen.kind == policy.kind) {
        throw ConfigError(file, line, "policy '" + item + "' listed twice");
      }
    }
    policies.push_back(policy);
  }
  if (policies.empty()) throw ConfigError(file, line, "policy list is empty");
  return policies;
}

/// Raw model pieces accumulated during parsing; assembled at section end so
/// key order inside a section does not matter.
struct Builder {
  std::string model = "linear";
  double a = 0.0;
  bool has_a = false;
  double theta = 0.0;
  bool has_theta = false;
  double theta1 = 0.0, theta2 = 0.0;
  bool has_theta12 = false;
  ExperimentConfig config;
  bool has_policies = false;

  void apply_preset(const ExperimentConfig& preset) {
    config = preset;
    has_policies = true;
    // Mirror the preset's model back into the raw fields so later keys can
    // override single pieces of it.
    switch (preset.model.family) {
      case DemandFamily::kLinearKnownIntercept:
        model = "linear";
        a = preset.model.intercept;
        has_a = true;
        theta = preset.true_params.scalar();
        has_theta = true;
        break;
      case DemandFamily::kLinearTwoParam:
        model = "linear2";
        theta1 = preset.true_params[0];
        theta2 = preset.true_params[1];
        has_theta12 = true;
        break;
      case DemandFamily::kLogLinearKnownIntercept:
        model = "loglinear";
        a = preset.model.intercept;
        has_a = true;
        theta = preset.true_params.scalar();
        has_theta = true;
        break;
      case DemandFamily::kPowerLaw:
        break;
    }
  }

  ExperimentConfig finish(const std::string& file, int line) {
    if (model == "linear" || model == "loglinear") {
      if (!has_a) throw ConfigError(file, line, "model needs intercept key 'a'");
      if (!has_theta) throw ConfigError(file, line, "model needs key 'theta'");
      config.model = model == "linear" ? DemandModel::linear(a) : DemandModel::log_linear(a);
      config.true_params = ParamVector(theta);
    } else if (model == "linear2") {
      if (!has_theta12) throw ConfigError(file, line, "model needs 'theta1' and 'theta2'");
      config.model = DemandModel::linear_two_param();
      config.true_params = ParamVector(theta1, theta2);
    } else {
      throw ConfigError(file, line, "unknown model '" + model + "'");
    }
    if (!has_policies) {
      throw ConfigError(file, line, "section has no 'policies' key");
    }
    try {
      validate_config(config);
    } catch (const std::exception& e) {
      throw ConfigError(file, line, e.what());
    }
    return config;
  }
};

}  // namespace

std::vector<NamedExperiment> parse_config_text(const std::string& text,
                                               const std::string& filename) {
  std::vector<NamedExperiment> experiments;
  Builder builder;
  std::string section;
  bool any_key = false;
  int section_line = 1;

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  const auto flush = [&](int line) {
    if (!any_key) return;
    experiments.push_back({section, builder.finish(filename, line)});
  };
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(filename, line_no, "unterminated section header");
      flush(line_no);
      builder = Builder{};
      any_key = false;
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(filename, line_no, "empty section name");
      section_line = line_no;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(filename, line_no, "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(filename, line_no, "expected key = value");
    }
    any_key = true;

    if (key == "preset") {
      try {
        builder.apply_preset(preset_config(value));
      } catch (const std::exception&) {
        throw ConfigError(filename, line_no, "unknown preset '" + value + "'");
      }
    } else if (key == "model") {
      builder.model = value;
    } else if (key == "a") {
      builder.a = parse_number(filename, line_no, key, value);
      builder.has_a = true;
    } else if (key == "theta") {
      builder.theta = parse_number(filename, line_no, key, value);
      builder.has_theta = true;
    } else if (key == "theta1") {
      builder.theta1 = parse_number(filename, line_no, key, value);
      builder.has_theta12 = true;
    } else if (key == "theta2") {
      builder.theta2 = parse_number(filename, line_no, key, value);
      builder.has_theta12 = true;
    } else if (key == "noise_var") {
      builder.config.noise_var = parse_number(filename, line_no, key, value);
    } else if (key == "price_low") {
      builder.config.price_low = parse_number(filename, line_no, key, value);
    } else if (key == "price_high") {
      builder.config.price_high = parse_number(filename, line_no, key, value);
    } else if (key == "n_grid") {
      builder.config.n_grid = parse_n_grid(filename, line_no, value);
    } else if (key == "replications") {
      builder.config.replications =
          static_cast<int>(std::llround(parse_number(filename, line_no, key, value)));
    } else if (key == "seed") {
      builder.config.seed =
          static_cast<std::uint64_t>(std::llround(parse_number(filename, line_no, key, value)));
    } else if (key == "floor") {
      builder.config.floor = parse_number(filename, line_no, key, value);
    } else if (key == "policies") {
      builder.config.policies = parse_policies(filename, line_no, value);
      builder.has_policies = true;
    } else if (key == "strategy") {
      SolveStrategy strategy;
      if (value == "pin_last") {
        strategy = SolveStrategy::kPinLast;
      } else if (value == "pin_first") {
        strategy = SolveStrategy::kPinFirst;
      } else {
        throw ConfigError(filename, line_no, "unknown strategy '" + value + "'");
      }
      for (AdjustmentPolicy& policy : builder.config.policies) policy.strategy = strategy;
    } else if (key == "bootstrap_b_mult" || key == "bootstrap_halfwidth_mult" ||
               key == "bootstrap_grid_step_mult" || key == "bootstrap_max_rounds") {
      const double v = parse_number(filename, line_no, key, value);
      for (AdjustmentPolicy& policy : builder.config.policies) {
        if (key == "bootstrap_b_mult") policy.bootstrap_b_mult = v;
        if (key == "bootstrap_halfwidth_mult") policy.bootstrap_halfwidth_mult = v;
        if (key == "bootstrap_grid_step_mult") policy.bootstrap_grid_step_mult = v;
        if (key == "bootstrap_max_rounds") policy.bootstrap_max_rounds = static_cast<int>(v);
      }
    } else {
      throw ConfigError(filename, line_no, "unknown key '" + key + "'");
    }
  }
  flush(line_no > 0 ? line_no : section_line);
  if (experiments.empty()) {
    throw ConfigError(filename, line_no, "config defines no experiment");
  }
  return experiments;
}

std::vector<NamedExperiment> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

namespace {

constexpr std::uint64_t kDefaultSeed = 20260810;

ExperimentConfig base_linear(double theta, double noise_var) {
  ExperimentConfig config;
  config.model = DemandModel::linear(60.0);
  config.true_params = ParamVector(theta);
  config.noise_var = noise_var;
  config.price_low = 0.1;
  config.price_high = 6.0;
  config.n_grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  config.replications = 10000;
  config.seed = kDefaultSeed;
  config.policies = {AdjustmentPolicy::pto(), AdjustmentPolicy::oracle(),
                     AdjustmentPolicy::plugin(), AdjustmentPolicy::bootstrap()};
  return config;
}

ExperimentConfig base_two_param(double theta2, double noise_var) {
  ExperimentConfig config = base_linear(3.0, noise_var);
  config.model = DemandModel::linear_two_param();
  config.true_params = ParamVector(60.0, theta2);
  config.policies = {AdjustmentPolicy::pto(), AdjustmentPolicy::oracle(),
                     AdjustmentPolicy::bootstrap()};
  return config;
}

ExperimentConfig base_log_linear(double theta, double noise_var) {
  ExperimentConfig config = base_linear(theta, noise_var);
  config.model = DemandModel::log_linear(8.0);
  config.price_low = 0.05;
  config.price_high = 1.0;
  return config;
}

std::string sigma_label(double v) {
  if (v == std::floor(v)) return std::to_string(static_cast<long long>(v));
  std::string s = format_double(v);
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const char* fig : {"fig2", "fig3", "fig4"}) {
    for (const std::string& panel : figure_panels(fig)) names.push_back(panel);
  }
  return names;
}

std::vector<std::string> figure_panels(const std::string& figure) {
  std::vector<std::string> panels;
  const auto add = [&](double theta, double sigma_sq) {
    panels.push_back(figure + "_theta" + sigma_label(theta) + "_sigma" +
                     sigma_label(sigma_sq));
  };
  if (figure == "fig2" || figure == "fig3") {
    add(3, 10);
    add(5, 10);
    add(3, 15);
    add(5, 15);
  } else if (figure == "fig4") {
    add(3, 0.5);
    add(5, 0.5);
    add(3, 1);
    add(5, 1);
  } else {
    throw std::invalid_argument("unknown figure id '" + figure + "'");
  }
  return panels;
}

ExperimentConfig preset_config(const std::string& name) {
  const auto parse_pair = [&](const std::string& prefix) {
    const std::string rest = name.substr(prefix.size());  // thetaX_sigmaY
    const auto us = rest.find("_sigma");
    if (rest.rfind("theta", 0) != 0 || us == std::string::npos) {
      throw std::invalid_argument("unknown preset '" + name + "'");
    }
    const double theta = std::stod(rest.substr(5, us - 5));
    const double sigma = std::stod(rest.substr(us + 6));
    return std::pair<double, double>(theta, sigma);
  };
  if (name.rfind("fig2_", 0) == 0) {
    const auto [theta, sigma] = parse_pair("fig2_");
    return base_linear(theta, sigma);
  }
  if (name.rfind("fig3_", 0) == 0) {
    const auto [theta, sigma] = parse_pair("fig3_");
    return base_two_param(theta, sigma);
  }
  if (name.rfind("fig4_", 0) == 0) {
    const auto [theta, sigma] = parse_pair("fig4_");
    return base_log_linear(theta, sigma);
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::general, 10);
  return std::string(buffer, result.ptr);
}

std::string canonical_config_string(const ExperimentConfig& config) {
  std::string s;
  s += std::string("tool=") + kToolName + "/" + kToolVersion + "\n";
  s += std::string("rng=") + kRngTag + "\n";
  switch (config.model.family) {
    case DemandFamily::kLinearKnownIntercept:
      s += "model=linear\na=" + format_double(config.model.intercept) + "\n";
      s += "theta=" + format_double(config.true_params.scalar()) + "\n";
      break;
    case DemandFamily::kLinearTwoParam:
      s += "model=linear2\n";
      s += "theta1=" + format_double(config.true_params[0]) + "\n";
      s += "theta2=" + format_double(config.true_params[1]) + "\n";
      break;
    case DemandFamily::kLogLinearKnownIntercept:
      s += "model=loglinear\na=" + format_double(config.model.intercept) + "\n";
      s += "theta=" + format_double(config.true_params.scalar()) + "\n";
      break;
    case DemandFamily::kPowerLaw:
      s += "model=powerlaw\na=" + format_double(config.model.intercept) + "\n";
      s += "gamma=" + format_double(config.model.gamma) + "\n";
      s += "theta=" + format_double(config.true_params.scalar()) + "\n";
      break;
  }
  s += "noise_var=" + format_double(config.noise_var) + "\n";
  s += "price_low=" + format_double(config.price_low) + "\n";
  s += "price_high=" + format_double(config.price_high) + "\n";
  s += "n_grid=";
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(config.n_grid[i]);
  }
  s += "\nreplications=" + std::to_string(config.replications) + "\n";
  s += "seed=" + std::to_string(config.seed) + "\n";
  s += "floor=" + format_double(config.floor) + "\n";
  s += "policies=";
  for (std::size_t i = 0; i < config.policies.size(); ++i) {
    const AdjustmentPolicy& p = config.policies[i];
    if (i) s += ",";
    s += policy_column(p.kind);
    if (p.kind == PolicyKind::kOracle) {
      s += (p.strategy == SolveStrategy::kPinLast ? "(pin_last)" : "(pin_first)");
    }
    if (p.kind == PolicyKind::kBootstrap) {
      s += "(b=" + format_double(p.bootstrap_b_mult) +
           ",w=" + format_double(p.bootstrap_halfwidth_mult) +
           ",g=" + format_double(p.bootstrap_grid_step_mult) +
           ",r=" + std::to_string(p.bootstrap_max_rounds) + ")";
    }
  }
  s += "\n";
  return s;
}

std::string config_digest(const ExperimentConfig& config) {
  const std::string canonical = canonical_config_string(config);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const unsigned char byte : canonical) {
    hash ^= byte;
    hash *= 0x100000001b3ull;
  }
  char buffer[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buffer[i] = digits[hash & 0xF];
    hash >>= 4;
  }
  buffer[16] = '\0';
  return std::string(buffer);
}

std::string format_csv(const ExperimentConfig& config,
                       const std::vector<MetricsRecord>& records) {
  std::string out = "n,pto";
  for (const AdjustmentPolicy& policy : config.policies) {
    if (policy.kind == PolicyKind::kPto) continue;
    out += "," + policy_column(policy.kind);
  }
  out += "\n";
  for (const MetricsRecord& record : records) {
    out += std::to_string(record.n) + "," + format_double(record.pto_relative);
    for (std::size_t k = 0; k < config.policies.size(); ++k) {
      if (config.policies[k].kind == PolicyKind::kPto) continue;
      out += "," + format_double(record.by_policy[k].mean_improvement);
    }
    out += "\n";
  }
  return out;
}

std::string format_manifest(const ExperimentConfig& config, const std::string& config_path,
                            const std::string& csv_path) {
  nlohmann::json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kToolVersion;
  manifest["rng"] = kRngTag;
  manifest["config_path"] = config_path;
  manifest["csv_path"] = csv_path;
  manifest["digest"] = config_digest(config);
  manifest["seed"] = config.seed;
  manifest["replications"] = config.replications;
  manifest["resolved"] = canonical_config_string(config);
  return manifest.dump(2) + "\n";
}

}  // namespace ptoadj
