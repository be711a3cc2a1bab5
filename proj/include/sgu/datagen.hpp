// Copyright 2026 The SGU Authors.
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

#ifndef SGU_DATAGEN_HPP_
#define SGU_DATAGEN_HPP_

#include <cstdint>

#include "sgu/graph.hpp"

namespace sgu {

/// Stochastic block model with Gaussian class features. Class c has mean
/// separation·e_c and unit-variance noise, so feature_dim must be >= classes.
struct SbmSpec {
  std::size_t n = 400;
  std::size_t classes = 4;
  double p_in = 0.05;
  double p_out = 0.005;
  std::size_t feature_dim = 16;
  double separation = 2.0;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Balanced labels (sizes differ by at most one), independent Bernoulli edges
/// per unordered pair, train/test split of every node. Every node is labeled;
/// test labels are used for evaluation only.
Graph generate_sbm(const SbmSpec& spec);

}  // namespace sgu

#endif  // SGU_DATAGEN_HPP_
