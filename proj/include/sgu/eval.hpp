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

#ifndef SGU_EVAL_HPP_
#define SGU_EVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sgu/graph.hpp"
#include "sgu/model.hpp"
#include "sgu/pipeline.hpp"

namespace sgu {

/// Mann-Whitney AUC: probability a positive outscores a negative, ties 0.5.
/// MetricError unless both classes are present.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// max posterior minus prediction entropy, per row of a probability matrix.
std::vector<double> posterior_attack_scores(const Matrix& probs);

struct AttackReport {
  double auc = 0.5;
  std::size_t members = 0;
  std::size_t non_members = 0;
  std::vector<NodeId> probes;         // members first, then non-members
  std::vector<double> scores;         // aligned with probes
  std::vector<std::uint8_t> is_member;
  std::string feature = "max_posterior-entropy";

  std::string to_json() const;
};

/// Posterior attack against `params` on `propagated`: members = UE, non-members
/// = an equal-size sample of `non_member_pool`. ConfigError if the pool is
/// smaller than UE.
AttackReport mia_attack(const ModelParams& params, const Matrix& propagated,
                        std::span<const NodeId> ue, std::span<const NodeId> non_member_pool,
                        std::uint64_t seed);

/// Same sampling, scores supplied by the caller (one per node).
AttackReport mia_attack_with_scores(std::span<const double> node_scores,
                                    std::span<const NodeId> ue,
                                    std::span<const NodeId> non_member_pool, std::uint64_t seed,
                                    std::string feature = "external");

/// Micro-averaged F1 over `mask` (equals accuracy). `predictions` and
/// `labels` are indexed by node id. MetricError on an empty mask.
double f1_score(std::span<const Label> predictions, std::span<const Label> labels,
                std::span<const NodeId> mask);

struct EdgeAttackReport {
  double ratio = 0.0;
  double f1_clean = 0.0;
  double f1_poisoned = 0.0;
  double f1_unlearned = 0.0;
  std::vector<Edge> injected;

  std::string to_json() const;
};

/// ⌈ratio·m⌉ distinct non-edges between different-label training nodes,
/// sampled uniformly. ConfigError for ratio outside (0, 0.5] or a zero count;
/// DataError when not enough eligible pairs exist.
std::vector<Edge> sample_cross_label_edges(const Graph& graph, double ratio, std::uint64_t seed);

/// Trains on the clean and poisoned graphs, unlearns exactly the injected
/// edges from the poisoned model and reports test F1 for all three models.
/// `graph` is never modified.
EdgeAttackReport edge_attack_run(const Graph& graph, double ratio, const PipelineConfig& config,
                                 std::uint64_t seed);

struct MetricRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string stage;
  std::string metric;
  double value = 0.0;
};

std::string metric_line(const MetricRecord& record);
std::vector<MetricRecord> parse_metrics(const std::string& jsonl);
std::vector<MetricRecord> read_metrics(const std::filesystem::path& path);

/// Append-only JSONL writer.
class MetricsWriter {
 public:
  explicit MetricsWriter(std::filesystem::path path, bool truncate = false);
  void write(const MetricRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace sgu

#endif  // SGU_EVAL_HPP_
