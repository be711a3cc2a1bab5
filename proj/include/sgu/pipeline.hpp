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

#ifndef SGU_PIPELINE_HPP_
#define SGU_PIPELINE_HPP_

#include <cstdint>
#include <optional>

#include "sgu/graph.hpp"
#include "sgu/model.hpp"
#include "sgu/nim.hpp"
#include "sgu/unlearn.hpp"

namespace sgu {

struct ModelSpec {
  ModelMode mode = ModelMode::kMlp;
  std::size_t hidden = 64;
};

enum class HieStrategy { kNim, kKhop, kNone };

const char* hie_strategy_name(HieStrategy strategy);
HieStrategy parse_hie_strategy(const std::string& name);

struct NimConfig {
  HieStrategy strategy = HieStrategy::kNim;
  double theta = 0.5;
  std::optional<std::size_t> budget;  // absolute; overrides the multiplier
  double budget_multiplier = 3.0;     // B = multiplier·|UE|
  SeedMode mode = SeedMode::kExpanding;
  std::size_t khop_hops = 2;

  std::size_t resolve_budget(std::size_t ue_size) const;
};

/// Everything one train → unlearn → evaluate run needs.
struct PipelineConfig {
  PropagationConfig propagation = PropagationConfig::sgc(3, 0.5);
  ModelSpec model;
  TrainConfig train;
  NimConfig nim;
  UnlearnConfig unlearn;
  std::size_t positives = 5;
  std::size_t negatives = 5;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

// Sub-stream ids for Rng::derive(config.seed, ...).
enum SeedStream : std::uint64_t {
  kInitStream = 10,
  kPartitionStream = 20,
  kMiaStream = 30,
  kRequestStream = 40,
  kEdgeAttackStream = 50,
};

/// A trained head together with the artifacts later stages reuse.
struct TrainedModel {
  ModelParams params;
  Matrix propagated;          // X̃ of the graph it was trained on
  Matrix soft_labels;         // predictions on `propagated`
  std::vector<Label> predicted;
  std::vector<double> loss_history;
};

Matrix propagate_graph(const Graph& graph, const PipelineConfig& config);

/// Propagates, initializes from the master seed and trains on the graph's
/// train mask.
TrainedModel train_model(const Graph& graph, const PipelineConfig& config);

/// Wraps loaded parameters with the propagated features and predictions of
/// `graph`. CheckpointError when the dimensions do not match the graph.
TrainedModel restore_model(const Graph& graph, ModelParams params, const PipelineConfig& config);

/// Reference oracle: the same training procedure on the post-removal graph.
TrainedModel retrain(const Graph& graph_after_removal, const PipelineConfig& config);

struct UnlearnOutcome {
  Graph graph_after;
  Matrix retain_features;  // propagated post-removal features
  std::vector<NodeId> ue;
  HieSelection hie;
  EntityPartition partition;
  FinetuneResult finetune;
};

/**
 * Request transformation → graph surgery → re-propagation → HIE selection on
 * the original graph → one-time partition caches → fine-tuning from the
 * original parameters.
 */
UnlearnOutcome unlearn(const Graph& graph, const TrainedModel& original,
                       const UnlearnRequest& request, const PipelineConfig& config);

/// A node request for round(fraction·|train|) random training nodes (at least 1).
UnlearnRequest sample_node_request(const Graph& graph, double fraction, std::uint64_t seed,
                                   RequestKind kind = RequestKind::kNode);

}  // namespace sgu

#endif  // SGU_PIPELINE_HPP_
