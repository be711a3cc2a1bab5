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

#ifndef SGU_GRAPH_HPP_
#define SGU_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgu/matrix.hpp"

namespace sgu {

using Label = std::int32_t;
inline constexpr Label kUnlabeled = -1;

using Edge = std::pair<NodeId, NodeId>;

/**
 * Immutable undirected attributed graph.
 *
 * Topology is a symmetric CSR without self-loops; column indices are strictly
 * increasing within each row. Train and test masks are disjoint sorted node
 * lists. Instances are produced by build_graph() and never mutated; request
 * handling builds a new Graph.
 */
class Graph {
 public:
  Graph() = default;

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  // Undirected edge count m.
  std::size_t num_edges() const { return columns_.size() / 2; }
  std::size_t num_features() const { return features_.cols(); }
  std::size_t num_classes() const { return classes_; }

  std::span<const std::size_t> row_offsets() const { return offsets_; }
  std::span<const NodeId> column_indices() const { return columns_; }
  std::span<const NodeId> neighbors(NodeId u) const {
    return std::span<const NodeId>(columns_).subspan(offsets_[u], offsets_[u + 1] - offsets_[u]);
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  bool has_edge(NodeId u, NodeId v) const;
  // Each undirected edge once, as (u, v) with u < v, in CSR order.
  std::vector<Edge> edge_list() const;

  const Matrix& features() const { return features_; }
  std::span<const Label> labels() const { return labels_; }
  Label label(NodeId u) const { return labels_[u]; }

  const std::vector<NodeId>& train_nodes() const { return train_; }
  const std::vector<NodeId>& test_nodes() const { return test_; }
  bool in_train(NodeId u) const { return membership_[u] == 1; }
  bool in_test(NodeId u) const { return membership_[u] == 2; }

  bool operator==(const Graph&) const = default;

 private:
  friend struct GraphBuilder;

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> columns_;
  Matrix features_;
  std::vector<Label> labels_;
  std::size_t classes_ = 0;
  std::vector<NodeId> train_;
  std::vector<NodeId> test_;
  std::vector<std::uint8_t> membership_;  // 0 none, 1 train, 2 test
};

struct BuildReport {
  std::size_t dropped_self_loops = 0;
  std::size_t merged_duplicates = 0;
};

/// Builds a canonical graph: edges are symmetrized, deduplicated and sorted;
/// input self-loops are dropped and counted in `report`. `labels` may be
/// empty (all unlabeled). `classes` = 0 infers the class count from labels.
///
/// Throws IndexError for out-of-range node ids, MaskError for overlapping
/// masks, DataError for non-finite features or invalid labels, ShapeError when
/// the feature row count differs from n.
Graph build_graph(std::size_t n, std::span<const Edge> edges, Matrix features,
                  std::vector<Label> labels, std::span<const NodeId> train_mask,
                  std::span<const NodeId> test_mask, std::size_t classes = 0,
                  BuildReport* report = nullptr);

// ---------------------------------------------------------------------------
// Propagation

enum class Scheme { kSgc, kS2gc, kGbp, kCustom };

const char* scheme_name(Scheme scheme);
Scheme parse_scheme(const std::string& name);

/// Weight-free propagation Π = Σ_l w_l S^l with S the r-normalized adjacency.
struct PropagationConfig {
  Scheme scheme = Scheme::kSgc;
  std::size_t k = 3;
  double r = 0.5;
  std::vector<double> weights;  // w_0 .. w_k

  static PropagationConfig sgc(std::size_t k, double r);
  static PropagationConfig s2gc(std::size_t k, double r);
  static PropagationConfig gbp(std::size_t k, double r, double beta);
  static PropagationConfig custom(double r, std::vector<double> weights);

  // Throws ConfigError when r, k or the weights are inconsistent.
  void validate() const;
};

/// CSR of S = D̂^{-r} Â D̂^{r-1} over Â = A + I: S_uv = d̂_u^{-r} d̂_v^{r-1}.
/// r = 1 gives the row-stochastic random-walk matrix D̂^{-1}Â, r = 1/2 the
/// symmetric GCN normalization.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::vector<std::size_t> offsets, std::vector<NodeId> columns,
                 std::vector<double> values, double r)
      : offsets_(std::move(offsets)), columns_(std::move(columns)),
        values_(std::move(values)), r_(r) {}

  std::size_t dimension() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t nonzeros() const { return values_.size(); }
  double r() const { return r_; }
  std::span<const std::size_t> row_offsets() const { return offsets_; }
  std::span<const NodeId> column_indices() const { return columns_; }
  std::span<const double> values() const { return values_; }

  // out = S * x. `workers` > 1 partitions output rows; every row is computed
  // by exactly one worker, so the result does not depend on the worker count.
  Matrix multiply(const Matrix& x, unsigned workers = 1) const;
  std::vector<double> multiply(std::span<const double> x) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> columns_;
  std::vector<double> values_;
  double r_ = 0.5;
};

SparseOperator normalized_adjacency(const Graph& graph, double r);

/// X̃ = Σ_l w_l S^l X by repeated sparse-dense products; S^l is never formed.
Matrix propagate(const SparseOperator& op, const Matrix& x, const PropagationConfig& config,
                 unsigned workers = 1);

/// Column u of Π, i.e. Π e_u. Entry v is the weighted walk mass from v to u.
std::vector<double> propagation_column(const SparseOperator& op, const PropagationConfig& config,
                                       NodeId u);

}  // namespace sgu

#endif  // SGU_GRAPH_HPP_
