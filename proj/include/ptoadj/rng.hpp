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

#include <array>
#include <cstdint>

namespace ptoadj {

/// Counter-based generator (Philox4x32-10, Salmon et al. 2011).
///
/// Every consumer owns an independent substream identified by a 64-bit
/// stream id; within a stream, 2^64 counter blocks of four 32-bit words
/// are available. Output depends only on (seed, stream, block, position),
/// so parallel workers drawing from disjoint streams reproduce the exact
/// sequence of a serial run.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream, std::uint64_t block_base = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double strictly inside (0,1), 53 usable bits.
  double next_uniform();

  /// Standard normal via the inverse-CDF map (AS241); fully deterministic.
  double next_normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

/// Inverse of the standard normal CDF (Wichura's PPND16 / algorithm AS241).
/// Relative accuracy about 1e-15 on (0,1); throws std::domain_error outside.
double normal_quantile(double p);

/// Substream id layout: [kind:4][n:24][index:36]. Keeps dataset noise,
/// bootstrap resampling and synthetic-estimator draws on disjoint streams.
enum class StreamKind : std::uint64_t {
  kDatasetNoise = 0,
  kBootstrap = 1,
  kSynthetic = 2,
  kAux = 3,
};

std::uint64_t substream_id(StreamKind kind, std::uint64_t n, std::uint64_t index);

/// Block-space partition for nested draws (one slice per bootstrap resample).
inline std::uint64_t block_slice(std::uint64_t slot) { return (slot + 1) << 40; }

}  // namespace ptoadj
