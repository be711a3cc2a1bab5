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

#include "sgu/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "sgu/errors.hpp"
#include "sgu/random.hpp"

namespace sgu {

const char* hie_strategy_name(HieStrategy strategy) {
  switch (strategy) {
    case HieStrategy::kNim: return "nim";
    case HieStrategy::kKhop: return "khop";
    case HieStrategy::kNone: return "none";
  }
  return "nim";
}

HieStrategy parse_hie_strategy(const std::string& name) {
  if (name == "nim") return HieStrategy::kNim;
  if (name == "khop") return HieStrategy::kKhop;
  if (name == "none") return HieStrategy::kNone;
  throw ConfigError("unknown HIE strategy '" + name + "'");
}

std::size_t NimConfig::resolve_budget(std::size_t ue_size) const {
  if (budget) return *budget;
  if (!(budget_multiplier >= 0.0)) throw ConfigError("budget multiplier must be >= 0");
  return static_cast<std::size_t>(std::llround(budget_multiplier * static_cast<double>(ue_size)));
}

namespace {

void attach_predictions(TrainedModel& model) {
  model.soft_labels = predict_proba(model.params, model.propagated);
  model.predicted.resize(model.soft_labels.rows());
  for (std::size_t v = 0; v < model.soft_labels.rows(); ++v) {
    auto row = model.soft_labels.row(v);
    model.predicted[v] = static_cast<Label>(std::max_element(row.begin(), row.end()) - row.begin());
  }
}

}  // namespace

Matrix propagate_graph(const Graph& graph, const PipelineConfig& config) {
  const SparseOperator op = normalized_adjacency(graph, config.propagation.r);
  return propagate(op, graph.features(), config.propagation, config.workers);
}

TrainedModel train_model(const Graph& graph, const PipelineConfig& config) {
  TrainedModel out;
  out.propagated = propagate_graph(graph, config);
  ModelParams init = init_model(graph.num_features(), config.model.hidden, graph.num_classes(),
                                config.model.mode, Rng::derive(config.seed, kInitStream));
  TrainResult trained =
      train(std::move(init), out.propagated, graph.labels(), graph.train_nodes(), config.train);
  out.params = std::move(trained.params);
  out.loss_history = std::move(trained.loss_history);
  attach_predictions(out);
  return out;
}

TrainedModel restore_model(const Graph& graph, ModelParams params, const PipelineConfig& config) {
  if (params.in_dim != graph.num_features() || params.classes != graph.num_classes()) {
    throw CheckpointError("checkpoint expects " + std::to_string(params.in_dim) + " features and " +
                          std::to_string(params.classes) + " classes, dataset has " +
                          std::to_string(graph.num_features()) + " and " +
                          std::to_string(graph.num_classes()));
  }
  TrainedModel out;
  out.propagated = propagate_graph(graph, config);
  out.params = std::move(params);
  attach_predictions(out);
  return out;
}

TrainedModel retrain(const Graph& graph_after_removal, const PipelineConfig& config) {
  return train_model(graph_after_removal, config);
}

UnlearnOutcome unlearn(const Graph& graph, const TrainedModel& original,
                       const UnlearnRequest& request, const PipelineConfig& config) {
  config.unlearn.validate();
  UnlearnOutcome out;
  out.ue = transform_request(request);
  out.graph_after = apply_removal(graph, request);
  out.retain_features = propagate_graph(out.graph_after, config);

  const std::size_t budget = config.nim.resolve_budget(out.ue.size());
  switch (config.nim.strategy) {
    case HieStrategy::kNim: {
      const SparseOperator op = normalized_adjacency(graph, config.propagation.r);
      out.hie = select_hie(op, config.propagation, out.ue, original.soft_labels, config.nim.theta,
                           budget, config.nim.mode);
      break;
    }
    case HieStrategy::kKhop: {
      const auto nodes = khop_hie(graph, out.ue, config.nim.khop_hops);
      for (std::size_t i = 0; i < nodes.size(); ++i) out.hie.entries.push_back({nodes[i], 0.0, i});
      out.hie.budget = nodes.size();
      break;
    }
    case HieStrategy::kNone:
      break;
  }

  std::vector<Label> known(graph.num_nodes(), kUnlabeled);
  for (NodeId u : graph.train_nodes()) known[u] = graph.label(u);
  PartitionInputs inputs;
  inputs.original = &original.params;
  inputs.retain_features = &out.retain_features;
  inputs.soft_labels = &original.soft_labels;
  inputs.known_labels = known;
  inputs.predicted_labels = original.predicted;
  const PartitionConfig sampling{config.positives, config.negatives,
                                 Rng::derive(config.seed, kPartitionStream)};
  out.partition =
      prepare_partition(out.ue, out.hie.nodes(), inputs, graph.num_classes(), sampling);

  out.finetune = finetune(original.params, out.partition, original.propagated,
                          out.retain_features, config.unlearn);
  return out;
}

UnlearnRequest sample_node_request(const Graph& graph, double fraction, std::uint64_t seed,
                                   RequestKind kind) {
  if (kind == RequestKind::kEdge) throw ConfigError("edge requests cannot be sampled by fraction");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("request fraction must be in (0, 1]");
  const auto& train = graph.train_nodes();
  if (train.empty()) throw DataError("graph has no training nodes to unlearn");
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(train.size()))));
  Rng rng(seed);
  UnlearnRequest req;
  req.kind = kind;
  req.nodes = rng.sample(train, std::min(count, train.size()));
  std::sort(req.nodes.begin(), req.nodes.end());
  return req;
}

}  // namespace sgu
