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

#include "sgu/nim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "sgu/errors.hpp"

namespace sgu {

std::vector<double> topology_influence(const SparseOperator& op, const PropagationConfig& config,
                                       NodeId u) {
  auto column = propagation_column(op, config, u);
  for (double& v : column) v = std::abs(v);
  return column;
}

void validate_soft_labels(const Matrix& soft_labels) {
  for (std::size_t v = 0; v < soft_labels.rows(); ++v) {
    double total = 0.0;
    for (double p : soft_labels.row(v)) {
      if (!(p >= 0.0)) throw DataError("soft label row " + std::to_string(v) + " has a negative entry");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw DataError("soft label row " + std::to_string(v) + " sums to " + std::to_string(total));
    }
  }
}

std::vector<double> feature_influence_from_column(std::span<const double> topology_column,
                                                  const Matrix& soft_labels, NodeId u) {
  if (soft_labels.rows() != topology_column.size()) {
    throw ShapeError("soft labels have " + std::to_string(soft_labels.rows()) + " rows, expected " +
                     std::to_string(topology_column.size()));
  }
  const auto zu = soft_labels.row(u);
  std::vector<double> out(topology_column.size(), 0.0);
  for (std::size_t v = 0; v < out.size(); ++v) {
    if (topology_column[v] == 0.0) continue;
    out[v] = std::abs(topology_column[v]) * dot(soft_labels.row(v), zu);
  }
  return out;
}

std::vector<double> feature_influence(const SparseOperator& op, const PropagationConfig& config,
                                      const Matrix& soft_labels, NodeId u) {
  validate_soft_labels(soft_labels);
  const auto column = topology_influence(op, config, u);
  return feature_influence_from_column(column, soft_labels, u);
}

// ---------------------------------------------------------------------------

const InfluenceEntry* InfluenceTable::find(NodeId v) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), v,
                             [](const InfluenceEntry& e, NodeId id) { return e.node < id; });
  return it != entries.end() && it->node == v ? &*it : nullptr;
}

InfluenceAccumulator::InfluenceAccumulator(std::size_t n)
    : topo_max_(n, 0.0), topo_sum_(n, 0.0), feat_max_(n, 0.0), feat_sum_(n, 0.0),
      is_seed_(n, 0) {}

void InfluenceAccumulator::add_seed(NodeId seed, std::span<const double> topology,
                                    std::span<const double> feature) {
  const std::size_t n = topo_max_.size();
  if (seed >= n) throw IndexError("seed " + std::to_string(seed) + " out of range");
  if (topology.size() != n || feature.size() != n) {
    throw ShapeError("influence column length differs from node count");
  }
  is_seed_[seed] = 1;
  ++seeds_;
  for (std::size_t v = 0; v < n; ++v) {
    topo_max_[v] = std::max(topo_max_[v], topology[v]);
    topo_sum_[v] += topology[v];
    feat_max_[v] = std::max(feat_max_[v], feature[v]);
    feat_sum_[v] += feature[v];
  }
}

InfluenceEntry InfluenceAccumulator::entry(NodeId v) const {
  InfluenceEntry e;
  e.node = v;
  e.raw_topology = topo_max_[v];
  e.raw_feature = feat_max_[v];
  e.topology = topo_sum_[v] > 0.0 ? topo_max_[v] / topo_sum_[v] : 0.0;
  e.feature = feat_sum_[v] > 0.0 ? feat_max_[v] / feat_sum_[v] : 0.0;
  e.combined = e.topology + e.feature;
  return e;
}

double InfluenceAccumulator::combined(NodeId v) const {
  const double t = topo_sum_[v] > 0.0 ? topo_max_[v] / topo_sum_[v] : 0.0;
  const double f = feat_sum_[v] > 0.0 ? feat_max_[v] / feat_sum_[v] : 0.0;
  return t + f;
}

InfluenceTable InfluenceAccumulator::table() const {
  InfluenceTable t;
  t.seed_version = seeds_;
  for (NodeId v = 0; v < topo_max_.size(); ++v) {
    if (!is_seed_[v]) t.entries.push_back(entry(v));
  }
  return t;
}

InfluenceTable normalize_influence(std::span<const SeedInfluence> raw, std::size_t n) {
  if (raw.empty()) throw ConfigError("influence normalization needs a nonempty seed set");
  InfluenceAccumulator acc(n);
  for (const auto& s : raw) acc.add_seed(s.seed, s.topology, s.feature);
  return acc.table();
}

// ---------------------------------------------------------------------------

const char* seed_mode_name(SeedMode mode) {
  return mode == SeedMode::kStatic ? "static" : "expanding";
}

SeedMode parse_seed_mode(const std::string& name) {
  if (name == "static") return SeedMode::kStatic;
  if (name == "expanding") return SeedMode::kExpanding;
  throw ConfigError("unknown seed mode '" + name + "'");
}

std::vector<NodeId> HieSelection::nodes() const {
  std::vector<NodeId> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.node);
  return out;
}

HieSelection select_hie(const SparseOperator& op, const PropagationConfig& config,
                        std::span<const NodeId> ue, const Matrix& soft_labels, double theta,
                        std::size_t budget, SeedMode mode) {
  if (ue.empty()) throw ConfigError("HIE selection needs a nonempty UE set");
  if (!(theta >= 0.0) || std::isnan(theta)) throw ConfigError("theta must be >= 0");
  config.validate();
  const std::size_t n = op.dimension();
  if (soft_labels.rows() != n) throw ShapeError("soft labels do not cover every node");
  validate_soft_labels(soft_labels);

  HieSelection selection;
  selection.theta = theta;
  selection.budget = budget;
  selection.mode = mode;
  if (budget == 0) return selection;

  InfluenceAccumulator acc(n);
  std::vector<std::uint8_t> excluded(n, 0);
  auto fold_seed = [&](NodeId u) {
    const auto topo = topology_influence(op, config, u);
    const auto feat = feature_influence_from_column(topo, soft_labels, u);
    acc.add_seed(u, topo, feat);
  };
  for (NodeId u : ue) {
    if (u >= n) throw IndexError("UE node " + std::to_string(u) + " out of range");
    if (excluded[u]) continue;
    excluded[u] = 1;
    fold_seed(u);
  }

  for (std::size_t round = 0; round < budget; ++round) {
    NodeId best = 0;
    double best_score = -1.0;
    for (NodeId v = 0; v < n; ++v) {
      if (excluded[v]) continue;
      const double s = acc.combined(v);
      if (s > best_score) {  // strict: equal scores keep the smaller id
        best_score = s;
        best = v;
      }
    }
    if (best_score < theta) break;
    selection.entries.push_back({best, best_score, round});
    excluded[best] = 1;
    if (mode == SeedMode::kExpanding) fold_seed(best);
  }
  return selection;
}

std::vector<NodeId> khop_hie(const Graph& graph, std::span<const NodeId> ue, std::size_t hops) {
  if (hops == 0) throw ConfigError("k-hop HIE needs hops >= 1");
  const std::size_t n = graph.num_nodes();
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(n, kUnseen);
  std::vector<NodeId> frontier;
  for (NodeId u : ue) {
    if (u >= n) throw IndexError("UE node " + std::to_string(u) + " out of range");
    if (dist[u] == kUnseen) {
      dist[u] = 0;
      frontier.push_back(u);
    }
  }
  for (std::size_t level = 1; level <= hops && !frontier.empty(); ++level) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (NodeId v : graph.neighbors(u)) {
        if (dist[v] == kUnseen) {
          dist[v] = level;
          next.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n; ++v) {
    if (dist[v] != kUnseen && dist[v] >= 1) out.push_back(v);
  }
  return out;
}

void write_hie_csv(const std::filesystem::path& path, const HieSelection& selection) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "node,score,round\n" << std::setprecision(17);
  for (const auto& e : selection.entries) out << e.node << ',' << e.score << ',' << e.round << '\n';
}

}  // namespace sgu
