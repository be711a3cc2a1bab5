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

#include "sgu/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgu/errors.hpp"
#include "sgu/random.hpp"

namespace sgu {

void SbmSpec::validate() const {
  if (classes < 2) throw ConfigError("sbm needs at least 2 classes");
  if (n < classes) throw ConfigError("sbm needs n >= classes");
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
    // p_in = p_out = 0 is the degenerate edgeless case and stays allowed.
    if (!(p_in == 0.0 && p_out == 0.0)) {
      throw ConfigError("sbm needs 0 <= p_out < p_in <= 1");
    }
  }
  if (feature_dim < classes) throw ConfigError("feature_dim must be >= classes");
  if (!std::isfinite(separation)) throw ConfigError("separation must be finite");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("train_fraction must be in (0, 1]");
  }
}

Graph generate_sbm(const SbmSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  Rng rng(spec.seed);

  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<Label>(i % spec.classes);
  rng.shuffle(labels);

  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? spec.p_in : spec.p_out;
      if (rng.uniform() < p) edges.emplace_back(u, v);
    }
  }

  Matrix features(n, spec.feature_dim);
  for (std::size_t u = 0; u < n; ++u) {
    auto row = features.row(u);
    for (double& v : row) v = rng.normal();
    row[static_cast<std::size_t>(labels[u])] += spec.separation;
  }

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const auto train_count = static_cast<std::size_t>(std::llround(spec.train_fraction * n));
  std::vector<NodeId> train(order.begin(), order.begin() + train_count);
  std::vector<NodeId> test(order.begin() + train_count, order.end());

  return build_graph(n, edges, std::move(features), std::move(labels), train, test, spec.classes);
}

}  // namespace sgu
