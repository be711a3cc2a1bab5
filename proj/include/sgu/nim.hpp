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

#ifndef SGU_NIM_HPP_
#define SGU_NIM_HPP_

// Node influence maximization: scores how strongly a fixed seed set (the
// unlearning entities) reaches every other node through the propagation
// operator, and greedily activates the most influenced nodes.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sgu/graph.hpp"

namespace sgu {

/// I_t(·, u, k) = |Π e_u|. The Jacobian of X̃_v with respect to X_u is
/// Π_vu·I, and the constant feature-dimension factor of its L1 norm cancels
/// in the normalization, so it is dropped.
std::vector<double> topology_influence(const SparseOperator& op, const PropagationConfig& config,
                                       NodeId u);

/// I_f(v, u, k) = |Π_vu|·⟨Z_v, Z_u⟩ with Z the original model's soft labels.
/// Throws DataError when a row of Z does not sum to 1 within 1e-6.
std::vector<double> feature_influence(const SparseOperator& op, const PropagationConfig& config,
                                      const Matrix& soft_labels, NodeId u);

// Same, reusing an already computed topology column.
std::vector<double> feature_influence_from_column(std::span<const double> topology_column,
                                                  const Matrix& soft_labels, NodeId u);

void validate_soft_labels(const Matrix& soft_labels);

/// Raw influence columns of one seed.
struct SeedInfluence {
  NodeId seed = 0;
  std::vector<double> topology;
  std::vector<double> feature;
};

struct InfluenceEntry {
  NodeId node = 0;
  double raw_topology = 0.0;  // max over seeds of I_t(v, u)
  double raw_feature = 0.0;
  double topology = 0.0;      // Ĩ_t(v, S) in [0, 1]
  double feature = 0.0;       // Ĩ_f(v, S) in [0, 1]
  double combined = 0.0;      // Ĩ_t + Ĩ_f in [0, 2]
};

/// Normalized influence of the current seed set on every non-seed node,
/// ordered by node id. Seeds carry no entry.
struct InfluenceTable {
  std::vector<InfluenceEntry> entries;
  std::size_t seed_version = 0;  // number of seeds folded in

  const InfluenceEntry* find(NodeId v) const;
};

/// Running per-node maxima and sums over the seed set, per channel.
/// Ĩ(v, S) = max_u I(v, u) / Σ_o I(v, o); a zero denominator gives 0.
/// Adding a seed costs one pass over its columns.
class InfluenceAccumulator {
 public:
  explicit InfluenceAccumulator(std::size_t n);

  void add_seed(NodeId seed, std::span<const double> topology, std::span<const double> feature);
  bool is_seed(NodeId v) const { return is_seed_[v] != 0; }
  std::size_t seed_count() const { return seeds_; }

  InfluenceEntry entry(NodeId v) const;
  double combined(NodeId v) const;
  InfluenceTable table() const;

 private:
  std::vector<double> topo_max_, topo_sum_, feat_max_, feat_sum_;
  std::vector<std::uint8_t> is_seed_;
  std::size_t seeds_ = 0;
};

/// Throws ConfigError for an empty seed set.
InfluenceTable normalize_influence(std::span<const SeedInfluence> raw, std::size_t n);

enum class SeedMode { kStatic, kExpanding };

const char* seed_mode_name(SeedMode mode);
SeedMode parse_seed_mode(const std::string& name);

struct HieEntry {
  NodeId node = 0;
  double score = 0.0;
  std::size_t round = 0;
};

struct HieSelection {
  std::vector<HieEntry> entries;  // greedy order
  double theta = 0.0;
  std::size_t budget = 0;
  SeedMode mode = SeedMode::kExpanding;

  std::vector<NodeId> nodes() const;
};

/**
 * Greedy HIE selection.
 *
 * Each round scores every node outside UE and the current selection and
 * appends the argmax (ties to the smaller id) if its combined score reaches
 * theta. In expanding mode the chosen node also joins the seed set; in static
 * mode the seeds stay equal to UE. Stops after `budget` picks or when no
 * candidate reaches theta.
 *
 * Throws ConfigError for an empty UE or a negative theta. Since scores never
 * exceed 2, any theta above 2 selects nothing.
 */
HieSelection select_hie(const SparseOperator& op, const PropagationConfig& config,
                        std::span<const NodeId> ue, const Matrix& soft_labels, double theta,
                        std::size_t budget, SeedMode mode);

/// Nodes at graph distance 1..hops from any UE node, excluding UE, sorted.
std::vector<NodeId> khop_hie(const Graph& graph, std::span<const NodeId> ue, std::size_t hops);

/// CSV with header `node,score,round`, one row per selected node.
void write_hie_csv(const std::filesystem::path& path, const HieSelection& selection);

}  // namespace sgu

#endif  // SGU_NIM_HPP_
