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

#include <cmath>
#include <cstddef>
#include <vector>

namespace ptoadj {

/// Dense order-3 tensor with value semantics; used for third derivatives
/// of multi-parameter rewards, where full index symmetry is expected.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int dim) : dim_(dim), v_(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

  int dim() const { return dim_; }

  double& operator()(int i, int j, int k) { return v_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return v_[index(i, j, k)]; }

  /// Max deviation from full symmetry over all index permutations.
  double symmetry_gap() const {
    double gap = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
          const double ref = (*this)(i, j, k);
          gap = std::max(gap, std::abs(ref - (*this)(i, k, j)));
          gap = std::max(gap, std::abs(ref - (*this)(j, i, k)));
          gap = std::max(gap, std::abs(ref - (*this)(k, j, i)));
        }
    return gap;
  }

  /// Average over the six index permutations; exactly symmetric afterwards.
  Tensor3 symmetrized() const {
    Tensor3 out(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
          out(i, j, k) = ((*this)(i, j, k) + (*this)(i, k, j) + (*this)(j, i, k) +
                          (*this)(j, k, i) + (*this)(k, i, j) + (*this)(k, j, i)) /
                         6.0;
        }
    return out;
  }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dim_ + j) * dim_ + k;
  }

  int dim_ = 0;
  std::vector<double> v_;
};

}  // namespace ptoadj
