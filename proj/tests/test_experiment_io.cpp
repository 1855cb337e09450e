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

#include <doctest.h>

#include <string>

#include "ptoadj/experiment_io.hpp"

using namespace ptoadj;

namespace {

const char* kSampleConfig = R"(# one linear panel
model = linear
a = 60
theta = 3
noise_var = 10
price_low = 0.1
price_high = 6
n_grid = 10:100:10
replications = 100
seed = 77
policies = pto, oracle, plugin, bootstrap
)";

}  // namespace

TEST_CASE("flat key-value config parses") {
  const auto experiments = parse_config_text(kSampleConfig, "sample.cfg");
  REQUIRE(experiments.size() == 1);
  const ExperimentConfig& config = experiments[0].config;
  CHECK(experiments[0].name.empty());
  CHECK(config.model.family == DemandFamily::kLinearKnownIntercept);
  CHECK(config.model.intercept == 60.0);
  CHECK(config.true_params.scalar() == 3.0);
  CHECK(config.noise_var == 10.0);
  CHECK(config.n_grid.size() == 10);
  CHECK(config.n_grid.front() == 10);
  CHECK(config.n_grid.back() == 100);
  CHECK(config.replications == 100);
  CHECK(config.seed == 77);
  REQUIRE(config.policies.size() == 4);
  CHECK(config.policies[0].kind == PolicyKind::kPto);
  CHECK(config.policies[3].kind == PolicyKind::kBootstrap);
}

TEST_CASE("sections give several experiments and presets expand") {
  const std::string text = R"(
[panel_a]
preset = fig2_theta3_sigma10
replications = 50

[panel_b]
preset = fig4_theta5_sigma1
replications = 50
seed = 5
)";
  const auto experiments = parse_config_text(text, "multi.cfg");
  REQUIRE(experiments.size() == 2);
  CHECK(experiments[0].name == "panel_a");
  CHECK(experiments[0].config.model.family == DemandFamily::kLinearKnownIntercept);
  CHECK(experiments[0].config.replications == 50);
  CHECK(experiments[1].name == "panel_b");
  CHECK(experiments[1].config.model.family == DemandFamily::kLogLinearKnownIntercept);
  CHECK(experiments[1].config.true_params.scalar() == 5.0);
  CHECK(experiments[1].config.noise_var == 1.0);
  CHECK(experiments[1].config.seed == 5);
  // fig3 presets drop the plug-in policy.
  const ExperimentConfig multi = preset_config("fig3_theta5_sigma15");
  CHECK(multi.model.family == DemandFamily::kLinearTwoParam);
  CHECK(multi.policies.size() == 3);
}

TEST_CASE("config errors carry the line number") {
  const std::string bad = "model = linear\na = 60\nbogus_key = 1\n";
  try {
    (void)parse_config_text(bad, "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string message = e.what();
    CHECK(message.find("bad.cfg:3") != std::string::npos);
    CHECK(message.find("bogus_key") != std::string::npos);
  }

  CHECK_THROWS_AS((void)parse_config_text("theta 3\n", "x.cfg"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("policies = pto,pto\nmodel = linear\n", "x.cfg"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("", "x.cfg"), ConfigError);
  // Valid keys but an incomplete model.
  CHECK_THROWS_AS((void)parse_config_text("model = linear\npolicies = pto\n", "x.cfg"),
                  ConfigError);
}

TEST_CASE("figure panels enumerate the benchmark presets") {
  CHECK(figure_panels("fig2") ==
        std::vector<std::string>{"fig2_theta3_sigma10", "fig2_theta5_sigma10",
                                 "fig2_theta3_sigma15", "fig2_theta5_sigma15"});
  CHECK(figure_panels("fig4") ==
        std::vector<std::string>{"fig4_theta3_sigma0.5", "fig4_theta5_sigma0.5",
                                 "fig4_theta3_sigma1", "fig4_theta5_sigma1"});
  CHECK_THROWS_AS((void)figure_panels("fig9"), std::invalid_argument);
  for (const std::string& name : preset_names()) {
    CHECK_NOTHROW((void)preset_config(name));
  }
}

TEST_CASE("csv format is stable and locale independent") {
  const auto experiments = parse_config_text(kSampleConfig, "sample.cfg");
  const ExperimentConfig& config = experiments[0].config;
  MetricsRecord record;
  record.n = 10;
  record.pto_relative = 0.96791302685;
  record.by_policy.resize(4);
  record.by_policy[1].mean_improvement = 0.00123456789;
  record.by_policy[2].mean_improvement = 4.5e-05;
  record.by_policy[3].mean_improvement = -1.25e-07;
  const std::string csv = format_csv(config, {record});
  CHECK(csv ==
        "n,pto,oracle,dd,boot\n"
        "10,0.9679130269,0.00123456789,4.5e-05,-1.25e-07\n");
}

TEST_CASE("digest covers output-relevant fields only") {
  ExperimentConfig a = preset_config("fig2_theta3_sigma10");
  ExperimentConfig b = a;
  CHECK(config_digest(a) == config_digest(b));
  b.seed += 1;
  CHECK(config_digest(a) != config_digest(b));
  b = a;
  b.replications = 999;
  CHECK(config_digest(a) != config_digest(b));
  b = a;
  b.noise_var = 15.0;
  CHECK(config_digest(a) != config_digest(b));
  b = a;
  b.policies.pop_back();
  CHECK(config_digest(a) != config_digest(b));

  const std::string manifest = format_manifest(a, "sample.cfg", "out.csv");
  CHECK(manifest.find(config_digest(a)) != std::string::npos);
  CHECK(manifest.find("philox4x32-10+as241") != std::string::npos);
}
