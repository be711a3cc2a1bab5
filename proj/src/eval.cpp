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

#include "sgu/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sgu/errors.hpp"
#include "sgu/random.hpp"

namespace sgu {

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
  std::size_t pos = 0;
  for (auto l : labels) pos += l ? 1 : 0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw MetricError("AUC needs both positive and negative samples");

  // Rank-sum with midranks for ties.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

std::vector<double> posterior_attack_scores(const Matrix& probs) {
  std::vector<double> out(probs.rows());
  for (std::size_t v = 0; v < probs.rows(); ++v) {
    double best = 0.0;
    double entropy = 0.0;
    for (double p : probs.row(v)) {
      best = std::max(best, p);
      if (p > 0.0) entropy -= p * std::log(p);
    }
    out[v] = best - entropy;
  }
  return out;
}

std::string AttackReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["auc"] = auc;
  doc["members"] = members;
  doc["non_members"] = non_members;
  doc["feature"] = feature;
  auto nodes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    nodes.push_back({{"node", probes[i]}, {"member", is_member[i] != 0}, {"score", scores[i]}});
  }
  doc["probes"] = std::move(nodes);
  return doc.dump(2);
}

AttackReport mia_attack_with_scores(std::span<const double> node_scores,
                                    std::span<const NodeId> ue,
                                    std::span<const NodeId> non_member_pool, std::uint64_t seed,
                                    std::string feature) {
  if (ue.empty()) throw ConfigError("membership attack needs at least one member");
  if (non_member_pool.size() < ue.size()) {
    throw ConfigError("non-member pool has " + std::to_string(non_member_pool.size()) +
                      " nodes, need " + std::to_string(ue.size()));
  }
  Rng rng(seed);
  const std::vector<NodeId> pool(non_member_pool.begin(), non_member_pool.end());
  const auto outsiders = rng.sample(pool, ue.size());

  AttackReport report;
  report.feature = std::move(feature);
  report.members = ue.size();
  report.non_members = outsiders.size();
  auto add = [&](NodeId v, bool member) {
    if (v >= node_scores.size()) throw IndexError("probe node " + std::to_string(v) + " out of range");
    report.probes.push_back(v);
    report.scores.push_back(node_scores[v]);
    report.is_member.push_back(member ? 1 : 0);
  };
  for (NodeId v : ue) add(v, true);
  for (NodeId v : outsiders) add(v, false);
  report.auc = auc(report.scores, report.is_member);
  return report;
}

AttackReport mia_attack(const ModelParams& params, const Matrix& propagated,
                        std::span<const NodeId> ue, std::span<const NodeId> non_member_pool,
                        std::uint64_t seed) {
  const auto scores = posterior_attack_scores(predict_proba(params, propagated));
  return mia_attack_with_scores(scores, ue, non_member_pool, seed, "max_posterior-entropy");
}

double f1_score(std::span<const Label> predictions, std::span<const Label> labels,
                std::span<const NodeId> mask) {
  if (mask.empty()) throw MetricError("F1 over an empty mask");
  std::size_t correct = 0;
  for (NodeId v : mask) {
    if (v >= predictions.size() || v >= labels.size()) {
      throw IndexError("mask node " + std::to_string(v) + " out of range");
    }
    if (predictions[v] == labels[v]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

std::string EdgeAttackReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["ratio"] = ratio;
  doc["f1_clean"] = f1_clean;
  doc["f1_poisoned"] = f1_poisoned;
  doc["f1_unlearned"] = f1_unlearned;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [u, v] : injected) edges.push_back({u, v});
  doc["injected"] = std::move(edges);
  return doc.dump(2);
}

std::vector<Edge> sample_cross_label_edges(const Graph& graph, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 0.5)) throw ConfigError("noise ratio must be in (0, 0.5]");
  const double wanted = std::ceil(ratio * static_cast<double>(graph.num_edges()));
  const auto count = static_cast<std::size_t>(wanted);
  if (count == 0) throw ConfigError("noise ratio too small for a graph with no edges");

  const auto& train = graph.train_nodes();
  std::vector<std::size_t> per_class(graph.num_classes(), 0);
  for (NodeId u : train) ++per_class[static_cast<std::size_t>(graph.label(u))];
  const double t = static_cast<double>(train.size());
  double same = 0.0;
  for (auto c : per_class) same += static_cast<double>(c) * static_cast<double>(c);
  double eligible = (t * t - same) / 2.0;
  for (const auto& [u, v] : graph.edge_list()) {
    if (graph.in_train(u) && graph.in_train(v) && graph.label(u) != graph.label(v)) eligible -= 1.0;
  }
  if (eligible < static_cast<double>(count)) {
    throw DataError("only " + std::to_string(static_cast<std::size_t>(eligible)) +
                    " cross-label train pairs available, need " + std::to_string(count));
  }

  Rng rng(seed);
  std::vector<Edge> out;
  out.reserve(count);
  if (eligible < 2.0 * static_cast<double>(count)) {
    std::vector<Edge> pairs;
    for (std::size_t i = 0; i < train.size(); ++i) {
      for (std::size_t j = i + 1; j < train.size(); ++j) {
        const NodeId a = std::min(train[i], train[j]);
        const NodeId b = std::max(train[i], train[j]);
        if (graph.label(a) != graph.label(b) && !graph.has_edge(a, b)) pairs.emplace_back(a, b);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    return rng.sample(std::move(pairs), count);
  }
  std::set<Edge> taken;
  while (out.size() < count) {
    const NodeId a0 = train[rng.below(train.size())];
    const NodeId b0 = train[rng.below(train.size())];
    if (graph.label(a0) == graph.label(b0)) continue;
    const Edge e{std::min(a0, b0), std::max(a0, b0)};
    if (graph.has_edge(e.first, e.second) || !taken.insert(e).second) continue;
    out.push_back(e);
  }
  return out;
}

EdgeAttackReport edge_attack_run(const Graph& graph, double ratio, const PipelineConfig& config,
                                 std::uint64_t seed) {
  EdgeAttackReport report;
  report.ratio = ratio;
  report.injected = sample_cross_label_edges(graph, ratio, seed);

  auto edges = graph.edge_list();
  edges.insert(edges.end(), report.injected.begin(), report.injected.end());
  const Graph poisoned =
      build_graph(graph.num_nodes(), edges, graph.features(),
                  std::vector<Label>(graph.labels().begin(), graph.labels().end()), graph.train_nodes(),
                  graph.test_nodes(), graph.num_classes());

  const TrainedModel clean = train_model(graph, config);
  const TrainedModel dirty = train_model(poisoned, config);
  report.f1_clean = f1_score(clean.predicted, graph.labels(), graph.test_nodes());
  report.f1_poisoned = f1_score(dirty.predicted, graph.labels(), graph.test_nodes());

  UnlearnRequest request;
  request.kind = RequestKind::kEdge;
  request.edges = report.injected;
  const UnlearnOutcome outcome = unlearn(poisoned, dirty, request, config);
  const auto predicted = predict_labels(outcome.finetune.params, outcome.retain_features);
  report.f1_unlearned = f1_score(predicted, graph.labels(), graph.test_nodes());
  return report;
}

// ---------------------------------------------------------------------------

std::string metric_line(const MetricRecord& record) {
  nlohmann::ordered_json doc;
  doc["run_id"] = record.run_id;
  doc["seed"] = record.seed;
  doc["stage"] = record.stage;
  doc["metric"] = record.metric;
  doc["value"] = record.value;
  return doc.dump();
}

std::vector<MetricRecord> parse_metrics(const std::string& jsonl) {
  std::vector<MetricRecord> out;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      MetricRecord r;
      r.run_id = doc.at("run_id").get<std::string>();
      r.seed = doc.at("seed").get<std::uint64_t>();
      r.stage = doc.at("stage").get<std::string>();
      r.metric = doc.at("metric").get<std::string>();
      r.value = doc.at("value").is_null() ? std::nan("") : doc.at("value").get<double>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("metrics line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MetricRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_metrics(buffer.str());
}

MetricsWriter::MetricsWriter(std::filesystem::path path, bool truncate) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, truncate ? std::ios::trunc : std::ios::app);
  if (!out) throw IoError("cannot open '" + path_.string() + "'");
}

void MetricsWriter::write(const MetricRecord& record) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot append to '" + path_.string() + "'");
  out << metric_line(record) << '\n';
}

}  // namespace sgu
