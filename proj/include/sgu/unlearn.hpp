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

#ifndef SGU_UNLEARN_HPP_
#define SGU_UNLEARN_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sgu/graph.hpp"
#include "sgu/model.hpp"

namespace sgu {

enum class RequestKind { kFeature, kNode, kEdge };

const char* request_kind_name(RequestKind kind);
RequestKind parse_request_kind(const std::string& name);

/// A deletion request: nodes for feature/node kinds, edges for the edge kind.
struct UnlearnRequest {
  RequestKind kind = RequestKind::kNode;
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;

  // JSON document {"kind": ..., "nodes": [...], "edges": [[u, v], ...]}.
  static UnlearnRequest from_json(const std::string& text);
  static UnlearnRequest load(const std::filesystem::path& path);
  std::string to_json() const;

  /// RequestError unless every referenced node is a training node of `graph`
  /// and every listed edge exists; ConfigError for an empty request.
  void validate(const Graph& graph) const;
};

/// Node-level unlearning entities: identity for feature and node requests,
/// the endpoint set for edge requests. Sorted, deduplicated, nonempty.
std::vector<NodeId> transform_request(const UnlearnRequest& request);

/// New graph with the request applied; n is unchanged. Edge: listed edges
/// removed. Feature: listed feature rows zeroed. Node: incident edges removed,
/// feature row zeroed, node dropped from the train mask and unlabeled.
Graph apply_removal(const Graph& graph, const UnlearnRequest& request);

/// For each UE node (in order), a uniformly random class different from its
/// label. ConfigError when classes < 2.
std::vector<Label> shuffle_labels(std::span<const NodeId> ue, std::span<const Label> labels,
                                  std::size_t classes, std::uint64_t seed);

/// Per-class mean embedding.
struct PrototypeTable {
  Matrix prototypes;                 // classes x d
  std::vector<std::size_t> counts;   // exemplars per class, 0 = absent
  bool has(Label c) const { return counts[static_cast<std::size_t>(c)] > 0; }
};

/// Means of `embeddings` rows grouped by `labels` (aligned with the rows;
/// unlabeled rows are skipped). PrototypeError names the first class in
/// `required` without exemplars.
PrototypeTable build_prototypes(const Matrix& embeddings, std::span<const Label> labels,
                                std::size_t classes, std::span<const Label> required = {});

struct PartitionConfig {
  std::size_t positives = 5;
  std::size_t negatives = 5;
  std::uint64_t seed = 0;
};

/**
 * UE / HIE / remaining Non-UE plus every one-time cache the fine-tuning
 * objective reads: shuffled UE labels, foreign-class prototype targets,
 * contrastive samples per HIE anchor and the original model's soft labels on
 * HIE.
 */
struct EntityPartition {
  std::vector<NodeId> ue;
  std::vector<NodeId> hie;
  std::vector<NodeId> rest;

  std::vector<Label> ue_labels;        // aligned with ue
  std::vector<Label> shuffled;         // aligned with ue
  std::vector<Label> prototype_class;  // aligned with ue, never equal to ue_labels
  PrototypeTable prototypes;
  std::vector<std::vector<NodeId>> positives;  // aligned with hie
  std::vector<std::vector<NodeId>> negatives;  // aligned with hie
  Matrix memory;                               // hie x classes, original soft labels
  bool prepared = false;
};

/// Inputs for prepare_partition.
struct PartitionInputs {
  const ModelParams* original = nullptr;
  const Matrix* retain_features = nullptr;  // post-removal propagated features
  const Matrix* soft_labels = nullptr;      // original model on original features
  std::span<const Label> known_labels;      // training labels, kUnlabeled elsewhere
  std::span<const Label> predicted_labels;  // original model argmax, every node
};

/// Builds the partition. Labels used for sampling are the known training
/// label where present, else the original prediction; HIE anchors always use
/// the prediction. Prototypes average the original model's embeddings of the
/// remaining Non-UE nodes.
EntityPartition prepare_partition(std::span<const NodeId> ue, std::span<const NodeId> hie,
                                  const PartitionInputs& inputs, std::size_t classes,
                                  const PartitionConfig& config);

/// Compact copy of every feature row the objective touches. UE rows come from
/// the forget view (the features the original model was trained on); all other
/// rows come from the retain view.
struct FinetuneBatch {
  std::vector<NodeId> nodes;  // global id per local row
  Matrix rows;
  std::vector<std::size_t> ue_local;
  std::vector<std::size_t> hie_local;
  std::vector<std::vector<std::size_t>> positive_local;
  std::vector<std::vector<std::size_t>> negative_local;
};

FinetuneBatch make_batch(const EntityPartition& partition, const Matrix& forget_view,
                         const Matrix& retain_view);

struct UnlearnConfig {
  double lambda = 0.5;
  double tau = 0.5;            // cosine temperature
  double weight_decay = 5e-4;  // coefficient of ‖W‖² in the reasoning loss
  double kl_floor = 1e-12;
  TrainConfig optimizer{5e-4, 0.0, 50};

  void validate() const;
};

struct LossBreakdown {
  double label = 0.0;        // shuffled-label cross-entropy over UE
  double prototype = 0.0;    // distance of UE embeddings to foreign prototypes
  double contrastive = 0.0;  // HIE anchors vs. Non-UE positives / UE∪HIE negatives
  double reasoning = 0.0;    // weight_decay·‖W‖² + KL(memory ‖ current) on HIE
  double total = 0.0;        // λ·forgetting + (1-λ)·reasoning

  double forgetting() const { return label + prototype + contrastive; }
};

enum class LossTerm {
  kLabel,
  kPrototype,
  kContrastive,
  kForgetting,
  kReasoning,
  kTotal,
};

double loss_value(const LossBreakdown& breakdown, LossTerm term);

/// Evaluates the requested term (LossBreakdown holds every component either
/// way) and accumulates its gradient into `grads` when non-null. StateError if
/// the partition is not prepared.
LossBreakdown evaluate_loss(const ModelParams& params, const EntityPartition& partition,
                            const FinetuneBatch& batch, const UnlearnConfig& config, LossTerm term,
                            ModelParams* grads);

struct ScalarLoss {
  double value = 0.0;
  ModelParams gradient;
};

ScalarLoss forgetting_loss(const ModelParams& params, const EntityPartition& partition,
                           const FinetuneBatch& batch, const UnlearnConfig& config);
ScalarLoss reasoning_loss(const ModelParams& params, const EntityPartition& partition,
                          const FinetuneBatch& batch, const UnlearnConfig& config);

struct FinetuneStats {
  std::size_t rows_per_step = 0;       // local rows read by each optimization step
  std::vector<NodeId> touched_nodes;   // global ids behind those rows, sorted
  std::vector<double> epoch_seconds;
};

struct FinetuneResult {
  ModelParams params;
  std::vector<LossBreakdown> log;  // one entry per epoch, before the step
  FinetuneStats stats;
};

/// λ-mixed fine-tuning from `params` (normally the original model). Only
/// the batch rows are read inside the loop.
FinetuneResult finetune(ModelParams params, const EntityPartition& partition,
                        const Matrix& forget_view, const Matrix& retain_view,
                        const UnlearnConfig& config);

void write_loss_log(const std::filesystem::path& path, std::span<const LossBreakdown> log);

}  // namespace sgu

#endif  // SGU_UNLEARN_HPP_
