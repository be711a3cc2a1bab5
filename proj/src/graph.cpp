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

#include "sgu/graph.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "sgu/errors.hpp"

namespace sgu {

struct GraphBuilder {
  static Graph make(std::size_t n, std::span<const Edge> edges, Matrix features,
                    std::vector<Label> labels, std::span<const NodeId> train_mask,
                    std::span<const NodeId> test_mask, std::size_t classes,
                    BuildReport* report) {
    if (features.rows() != n) {
      throw ShapeError("feature matrix has " + std::to_string(features.rows()) +
                       " rows, expected " + std::to_string(n));
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (!std::isfinite(features.values()[i])) {
        throw DataError("non-finite feature at row " + std::to_string(i / features.cols()) +
                        ", column " + std::to_string(i % features.cols()));
      }
    }

    if (labels.empty()) labels.assign(n, kUnlabeled);
    if (labels.size() != n) {
      throw ShapeError("label vector has " + std::to_string(labels.size()) +
                       " entries, expected " + std::to_string(n));
    }
    Label max_label = kUnlabeled;
    for (Label y : labels) {
      if (y < kUnlabeled) throw DataError("negative class id " + std::to_string(y));
      max_label = std::max(max_label, y);
    }
    if (classes == 0) classes = static_cast<std::size_t>(max_label + 1);
    if (max_label >= 0 && static_cast<std::size_t>(max_label) >= classes) {
      throw DataError("class id " + std::to_string(max_label) + " exceeds class count " +
                      std::to_string(classes));
    }

    BuildReport local;
    std::vector<Edge> directed;
    directed.reserve(edges.size() * 2);
    for (const auto& [u, v] : edges) {
      if (u >= n || v >= n) {
        throw IndexError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                         ") references a node >= n = " + std::to_string(n));
      }
      if (u == v) {
        ++local.dropped_self_loops;
        continue;
      }
      directed.emplace_back(u, v);
      directed.emplace_back(v, u);
    }
    std::sort(directed.begin(), directed.end());
    const auto before = directed.size();
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
    local.merged_duplicates = (before - directed.size()) / 2;
    if (report != nullptr) *report = local;

    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (const auto& e : directed) ++g.offsets_[e.first + 1];
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.columns_.reserve(directed.size());
    for (const auto& e : directed) g.columns_.push_back(e.second);

    g.features_ = std::move(features);
    g.labels_ = std::move(labels);
    g.classes_ = classes;
    g.membership_.assign(n, 0);
    g.train_ = canonical_mask(train_mask, n);
    g.test_ = canonical_mask(test_mask, n);
    for (NodeId u : g.train_) g.membership_[u] = 1;
    for (NodeId u : g.test_) {
      if (g.membership_[u] == 1) {
        throw MaskError("node " + std::to_string(u) + " is in both train and test masks");
      }
      g.membership_[u] = 2;
    }
    return g;
  }

  static std::vector<NodeId> canonical_mask(std::span<const NodeId> mask, std::size_t n) {
    std::vector<NodeId> out(mask.begin(), mask.end());
    for (NodeId u : out) {
      if (u >= n) throw IndexError("mask node " + std::to_string(u) + " >= n");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

Graph build_graph(std::size_t n, std::span<const Edge> edges, Matrix features,
                  std::vector<Label> labels, std::span<const NodeId> train_mask,
                  std::span<const NodeId> test_mask, std::size_t classes,
                  BuildReport* report) {
  return GraphBuilder::make(n, edges, std::move(features), std::move(labels), train_mask,
                            test_mask, classes, report);
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= num_nodes() || v >= num_nodes()) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSgc: return "sgc";
    case Scheme::kS2gc: return "s2gc";
    case Scheme::kGbp: return "gbp";
    case Scheme::kCustom: return "custom";
  }
  return "custom";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "sgc") return Scheme::kSgc;
  if (name == "s2gc") return Scheme::kS2gc;
  if (name == "gbp") return Scheme::kGbp;
  if (name == "custom") return Scheme::kCustom;
  throw ConfigError("unknown propagation scheme '" + name + "'");
}

PropagationConfig PropagationConfig::sgc(std::size_t k, double r) {
  PropagationConfig c{Scheme::kSgc, k, r, std::vector<double>(k + 1, 0.0)};
  c.weights[k] = 1.0;
  return c;
}

PropagationConfig PropagationConfig::s2gc(std::size_t k, double r) {
  return {Scheme::kS2gc, k, r,
          std::vector<double>(k + 1, 1.0 / static_cast<double>(k + 1))};
}

PropagationConfig PropagationConfig::gbp(std::size_t k, double r, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("gbp beta must be in (0, 1]");
  PropagationConfig c{Scheme::kGbp, k, r, {}};
  double w = beta;
  for (std::size_t l = 0; l <= k; ++l) {
    c.weights.push_back(w);
    w *= 1.0 - beta;
  }
  return c;
}

PropagationConfig PropagationConfig::custom(double r, std::vector<double> weights) {
  if (weights.empty()) throw ConfigError("custom propagation needs at least one weight");
  const std::size_t k = weights.size() - 1;
  return {Scheme::kCustom, k, r, std::move(weights)};
}

void PropagationConfig::validate() const {
  if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("kernel coefficient r must be in [0, 1]");
  if (weights.size() != k + 1) {
    throw ConfigError("propagation needs k+1 = " + std::to_string(k + 1) + " weights, got " +
                      std::to_string(weights.size()));
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw ConfigError("non-finite propagation weight");
  }
}

// ---------------------------------------------------------------------------

SparseOperator normalized_adjacency(const Graph& graph, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("kernel coefficient r must be in [0, 1]");
  const std::size_t n = graph.num_nodes();
  std::vector<double> left(n), right(n);
  for (NodeId u = 0; u < n; ++u) {
    const double d = static_cast<double>(graph.degree(u) + 1);
    left[u] = std::pow(d, -r);
    right[u] = std::pow(d, r - 1.0);
  }

  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<NodeId> columns;
  std::vector<double> values;
  columns.reserve(2 * graph.num_edges() + n);
  values.reserve(2 * graph.num_edges() + n);
  for (NodeId u = 0; u < n; ++u) {
    bool self_done = false;
    auto emit = [&](NodeId v) {
      columns.push_back(v);
      values.push_back(left[u] * right[v]);
    };
    for (NodeId v : graph.neighbors(u)) {
      if (!self_done && v > u) {
        emit(u);
        self_done = true;
      }
      emit(v);
    }
    if (!self_done) emit(u);
    offsets[u + 1] = columns.size();
  }
  return SparseOperator(std::move(offsets), std::move(columns), std::move(values), r);
}

Matrix SparseOperator::multiply(const Matrix& x, unsigned workers) const {
  const std::size_t n = dimension();
  if (x.rows() != n) {
    throw ShapeError("operator dimension " + std::to_string(n) + " vs matrix rows " +
                     std::to_string(x.rows()));
  }
  Matrix out(n, x.cols());
  auto rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      auto dst = out.row(u);
      for (std::size_t p = offsets_[u]; p < offsets_[u + 1]; ++p) {
        const double a = values_[p];
        auto src = x.row(columns_[p]);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += a * src[j];
      }
    }
  };
  if (workers <= 1 || n < 2 * workers) {
    rows(0, n);
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    pool.emplace_back(rows, begin, std::min(n, begin + chunk));
  }
  return out;
}

std::vector<double> SparseOperator::multiply(std::span<const double> x) const {
  const std::size_t n = dimension();
  if (x.size() != n) throw ShapeError("operator/vector dimension mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    double s = 0.0;
    for (std::size_t p = offsets_[u]; p < offsets_[u + 1]; ++p) s += values_[p] * x[columns_[p]];
    out[u] = s;
  }
  return out;
}

Matrix propagate(const SparseOperator& op, const Matrix& x, const PropagationConfig& config,
                 unsigned workers) {
  config.validate();
  if (x.rows() != op.dimension()) {
    throw ShapeError("propagate: feature rows " + std::to_string(x.rows()) +
                     " vs operator dimension " + std::to_string(op.dimension()));
  }
  Matrix acc(x.rows(), x.cols());
  Matrix current = x;
  for (std::size_t l = 0; l <= config.k; ++l) {
    if (l > 0) current = op.multiply(current, workers);
    const double w = config.weights[l];
    if (w == 0.0) continue;
    auto& dst = acc.values();
    const auto& src = current.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
  }
  return acc;
}

std::vector<double> propagation_column(const SparseOperator& op, const PropagationConfig& config,
                                       NodeId u) {
  config.validate();
  const std::size_t n = op.dimension();
  if (u >= n) {
    throw IndexError("node " + std::to_string(u) + " out of range for n = " + std::to_string(n));
  }
  std::vector<double> current(n, 0.0);
  current[u] = 1.0;
  std::vector<double> acc(n, 0.0);
  for (std::size_t l = 0; l <= config.k; ++l) {
    if (l > 0) current = op.multiply(current);
    const double w = config.weights[l];
    if (w == 0.0) continue;
    for (std::size_t v = 0; v < n; ++v) acc[v] += w * current[v];
  }
  return acc;
}

}  // namespace sgu
