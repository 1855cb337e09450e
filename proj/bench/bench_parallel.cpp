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
//
// Wall-clock comparison of the serial reference loop against the OpenMP
// replication loop, with a bitwise equality check of the reduced metrics.
//
//   ptoadj_bench [replications] [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ptoadj/experiment_io.hpp"
#include "ptoadj/simulation.hpp"

using namespace ptoadj;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool identical(const std::vector<MetricsRecord>& a, const std::vector<MetricsRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].pto_relative != b[i].pto_relative) return false;
    if (a[i].stderr_pto_relative != b[i].stderr_pto_relative) return false;
    for (std::size_t k = 0; k < a[i].by_policy.size(); ++k) {
      if (a[i].by_policy[k].mean_improvement != b[i].by_policy[k].mean_improvement) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig config = preset_config("fig2_theta3_sigma10");
  config.replications = argc > 1 ? std::atoi(argv[1]) : 4000;
  const int threads = argc > 2 ? std::atoi(argv[2]) : 0;

#ifdef _OPENMP
  const int workers = threads > 0 ? threads : omp_get_max_threads();
#else
  const int workers = 1;
#endif
  std::printf("panel fig2_theta3_sigma10, %d replications, %d worker thread(s)\n",
              config.replications, workers);

  auto start = std::chrono::steady_clock::now();
  const std::vector<MetricsRecord> serial =
      run_experiment(config, ExecutionMode::kSerial);
  const double t_serial = seconds_since(start);
  std::printf("serial reference : %8.3f s\n", t_serial);

  start = std::chrono::steady_clock::now();
  const std::vector<MetricsRecord> parallel =
      run_experiment(config, ExecutionMode::kParallel, threads);
  const double t_parallel = seconds_since(start);
  std::printf("openmp parallel  : %8.3f s  (speedup %.2fx)\n", t_parallel,
              t_serial / t_parallel);

  const bool same = identical(serial, parallel);
  std::printf("reduced metrics bitwise identical: %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
