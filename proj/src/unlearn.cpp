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

#include "sgu/unlearn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "sgu/errors.hpp"
#include "sgu/random.hpp"

namespace sgu {

namespace {

std::vector<NodeId> sorted_unique(std::span<const NodeId> nodes) {
  std::vector<NodeId> out(nodes.begin(), nodes.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Edge canonical(Edge e) { return e.first < e.second ? e : Edge{e.second, e.first}; }

}  // namespace

const char* request_kind_name(RequestKind kind) {
  switch (kind) {
    case RequestKind::kFeature: return "feature";
    case RequestKind::kNode: return "node";
    case RequestKind::kEdge: return "edge";
  }
  return "node";
}

RequestKind parse_request_kind(const std::string& name) {
  if (name == "feature") return RequestKind::kFeature;
  if (name == "node") return RequestKind::kNode;
  if (name == "edge") return RequestKind::kEdge;
  throw ConfigError("unknown request kind '" + name + "'");
}

UnlearnRequest UnlearnRequest::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed request: ") + e.what());
  }
  UnlearnRequest req;
  try {
    req.kind = parse_request_kind(doc.at("kind").get<std::string>());
    if (doc.contains("nodes")) req.nodes = doc["nodes"].get<std::vector<NodeId>>();
    if (doc.contains("edges")) {
      for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2) throw ConfigError("request edges must be [u, v] pairs");
        req.edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed request: ") + e.what());
  }
  const bool wants_edges = req.kind == RequestKind::kEdge;
  if (wants_edges ? !req.nodes.empty() : !req.edges.empty()) {
    throw ConfigError(std::string("a ") + request_kind_name(req.kind) +
                      " request must not populate '" + (wants_edges ? "nodes" : "edges") + "'");
  }
  return req;
}

UnlearnRequest UnlearnRequest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read request '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string UnlearnRequest::to_json() const {
  nlohmann::json doc;
  doc["kind"] = request_kind_name(kind);
  doc["nodes"] = nodes;
  doc["edges"] = nlohmann::json::array();
  for (const auto& [u, v] : edges) doc["edges"].push_back({u, v});
  return doc.dump();
}

void UnlearnRequest::validate(const Graph& graph) const {
  const bool empty = kind == RequestKind::kEdge ? edges.empty() : nodes.empty();
  if (empty) throw ConfigError("empty unlearning request");
  auto check_node = [&](NodeId u) {
    if (u >= graph.num_nodes()) throw RequestError("node " + std::to_string(u) + " does not exist");
    if (!graph.in_train(u)) {
      throw RequestError("node " + std::to_string(u) + " is not a training node");
    }
  };
  if (kind == RequestKind::kEdge) {
    for (const auto& [u, v] : edges) {
      check_node(u);
      check_node(v);
      if (!graph.has_edge(u, v)) {
        throw RequestError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                           ") does not exist");
      }
    }
  } else {
    for (NodeId u : nodes) check_node(u);
  }
}

std::vector<NodeId> transform_request(const UnlearnRequest& request) {
  std::vector<NodeId> out;
  if (request.kind == RequestKind::kEdge) {
    for (const auto& [u, v] : request.edges) {
      out.push_back(u);
      out.push_back(v);
    }
  } else {
    out = request.nodes;
  }
  if (out.empty()) throw ConfigError("empty unlearning request");
  return sorted_unique(out);
}

Graph apply_removal(const Graph& graph, const UnlearnRequest& request) {
  request.validate(graph);
  const std::size_t n = graph.num_nodes();
  Matrix features = graph.features();
  std::vector<Label> labels(graph.labels().begin(), graph.labels().end());
  std::vector<NodeId> train = graph.train_nodes();
  std::vector<Edge> edges = graph.edge_list();

  switch (request.kind) {
    case RequestKind::kEdge: {
      std::vector<Edge> drop;
      for (const auto& e : request.edges) drop.push_back(canonical(e));
      std::sort(drop.begin(), drop.end());
      std::erase_if(edges, [&](const Edge& e) {
        return std::binary_search(drop.begin(), drop.end(), e);
      });
      break;
    }
    case RequestKind::kFeature:
      for (NodeId u : request.nodes) std::fill(features.row(u).begin(), features.row(u).end(), 0.0);
      break;
    case RequestKind::kNode: {
      std::vector<std::uint8_t> removed(n, 0);
      for (NodeId u : request.nodes) {
        removed[u] = 1;
        std::fill(features.row(u).begin(), features.row(u).end(), 0.0);
        labels[u] = kUnlabeled;
      }
      std::erase_if(edges, [&](const Edge& e) { return removed[e.first] || removed[e.second]; });
      std::erase_if(train, [&](NodeId u) { return removed[u] != 0; });
      break;
    }
  }
  return build_graph(n, edges, std::move(features), std::move(labels), train, graph.test_nodes(),
                     graph.num_classes());
}

std::vector<Label> shuffle_labels(std::span<const NodeId> ue, std::span<const Label> labels,
                                  std::size_t classes, std::uint64_t seed) {
  if (classes < 2) throw ConfigError("label shuffling needs at least 2 classes");
  Rng rng(seed);
  std::vector<Label> out;
  out.reserve(ue.size());
  for (NodeId u : ue) {
    const Label y = labels[u];
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw DataError("UE node " + std::to_string(u) + " has no valid label to shuffle");
    }
    const auto draw = static_cast<Label>(rng.below(classes - 1));
    out.push_back(draw >= y ? draw + 1 : draw);
  }
  return out;
}

PrototypeTable build_prototypes(const Matrix& embeddings, std::span<const Label> labels,
                                std::size_t classes, std::span<const Label> required) {
  if (labels.size() != embeddings.rows()) throw ShapeError("one label per embedding row expected");
  PrototypeTable table{Matrix(classes, embeddings.cols()), std::vector<std::size_t>(classes, 0)};
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    const Label c = labels[i];
    if (c == kUnlabeled) continue;
    auto dst = table.prototypes.row(static_cast<std::size_t>(c));
    auto src = embeddings.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    ++table.counts[static_cast<std::size_t>(c)];
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (table.counts[c] == 0) continue;
    const double inv = 1.0 / static_cast<double>(table.counts[c]);
    for (double& v : table.prototypes.row(c)) v *= inv;
  }
  for (Label c : required) {
    if (table.counts[static_cast<std::size_t>(c)] == 0) {
      throw PrototypeError("class " + std::to_string(c) + " has no Non-UE exemplar");
    }
  }
  return table;
}

EntityPartition prepare_partition(std::span<const NodeId> ue_in, std::span<const NodeId> hie_in,
                                  const PartitionInputs& inputs, std::size_t classes,
                                  const PartitionConfig& config) {
  if (inputs.original == nullptr || inputs.retain_features == nullptr ||
      inputs.soft_labels == nullptr) {
    throw StateError("partition inputs are incomplete");
  }
  const std::size_t n = inputs.retain_features->rows();
  if (inputs.known_labels.size() != n || inputs.predicted_labels.size() != n ||
      inputs.soft_labels->rows() != n) {
    throw ShapeError("partition label vectors must cover every node");
  }
  if (ue_in.empty()) throw ConfigError("partition needs a nonempty UE set");

  EntityPartition p;
  p.ue = sorted_unique(ue_in);
  std::vector<std::uint8_t> role(n, 0);  // 1 UE, 2 HIE
  for (NodeId u : p.ue) {
    if (u >= n) throw IndexError("UE node " + std::to_string(u) + " out of range");
    role[u] = 1;
  }
  for (NodeId v : hie_in) {
    if (v >= n) throw IndexError("HIE node " + std::to_string(v) + " out of range");
    if (role[v] == 1) throw ConfigError("HIE node " + std::to_string(v) + " is also UE");
    if (role[v] == 2) continue;
    role[v] = 2;
    p.hie.push_back(v);
  }
  for (NodeId v = 0; v < n; ++v) {
    if (role[v] == 0) p.rest.push_back(v);
  }

  std::vector<Label> sample_label(n);
  for (std::size_t v = 0; v < n; ++v) {
    sample_label[v] = inputs.known_labels[v] != kUnlabeled ? inputs.known_labels[v]
                                                           : inputs.predicted_labels[v];
  }

  for (NodeId u : p.ue) p.ue_labels.push_back(sample_label[u]);
  p.shuffled = shuffle_labels(p.ue, sample_label, classes, Rng::derive(config.seed, 1));

  {
    const Matrix rest_embed =
        forward_embed(*inputs.original, gather_rows(*inputs.retain_features, p.rest));
    std::vector<Label> rest_labels;
    rest_labels.reserve(p.rest.size());
    for (NodeId v : p.rest) rest_labels.push_back(sample_label[v]);
    p.prototypes = build_prototypes(rest_embed, rest_labels, classes);
    // Classes absent from the remaining nodes (large HIE sets) fall back to
    // the HIE members, which are still Non-UE.
    bool missing = false;
    for (std::size_t c = 0; c < classes; ++c) missing |= p.prototypes.counts[c] == 0;
    if (missing && !p.hie.empty()) {
      const Matrix hie_embed =
          forward_embed(*inputs.original, gather_rows(*inputs.retain_features, p.hie));
      std::vector<Label> hie_labels;
      for (NodeId v : p.hie) hie_labels.push_back(sample_label[v]);
      const PrototypeTable extra = build_prototypes(hie_embed, hie_labels, classes);
      for (std::size_t c = 0; c < classes; ++c) {
        if (p.prototypes.counts[c] > 0 || extra.counts[c] == 0) continue;
        p.prototypes.counts[c] = extra.counts[c];
        auto dst = p.prototypes.prototypes.row(c);
        auto src = extra.prototypes.row(c);
        std::copy(src.begin(), src.end(), dst.begin());
      }
    }
  }

  Rng target_rng(Rng::derive(config.seed, 2));
  for (std::size_t i = 0; i < p.ue.size(); ++i) {
    std::vector<Label> foreign;
    for (std::size_t c = 0; c < classes; ++c) {
      const auto label = static_cast<Label>(c);
      if (label != p.ue_labels[i] && p.prototypes.has(label)) foreign.push_back(label);
    }
    if (foreign.empty()) {
      throw PrototypeError("no foreign-class prototype for UE node " + std::to_string(p.ue[i]));
    }
    p.prototype_class.push_back(foreign[target_rng.below(foreign.size())]);
  }

  std::vector<std::vector<NodeId>> rest_by_label(classes), forget_by_label(classes);
  for (NodeId v : p.rest) rest_by_label[static_cast<std::size_t>(sample_label[v])].push_back(v);
  for (NodeId v : p.ue) forget_by_label[static_cast<std::size_t>(sample_label[v])].push_back(v);
  for (NodeId v : p.hie) forget_by_label[static_cast<std::size_t>(sample_label[v])].push_back(v);

  Rng sample_rng(Rng::derive(config.seed, 3));
  for (NodeId anchor : p.hie) {
    const auto c = static_cast<std::size_t>(inputs.predicted_labels[anchor]);

    const auto& same_rest = rest_by_label[c];
    const auto& pos_pool = same_rest.empty() ? p.rest : same_rest;
    p.positives.push_back(
        sample_rng.sample(pos_pool, std::min(config.positives, pos_pool.size())));

    std::vector<NodeId> same, other;
    for (std::size_t k = 0; k < classes; ++k) {
      for (NodeId v : forget_by_label[k]) {
        if (v == anchor) continue;
        (k == c ? same : other).push_back(v);
      }
    }
    auto neg = sample_rng.sample(same, std::min(config.negatives, same.size()));
    if (neg.size() < config.negatives) {
      auto extra = sample_rng.sample(other, std::min(config.negatives - neg.size(), other.size()));
      neg.insert(neg.end(), extra.begin(), extra.end());
    }
    p.negatives.push_back(std::move(neg));
  }

  p.memory = gather_rows(*inputs.soft_labels, p.hie);
  p.prepared = true;
  return p;
}

FinetuneBatch make_batch(const EntityPartition& partition, const Matrix& forget_view,
                         const Matrix& retain_view) {
  if (!partition.prepared) throw StateError("partition caches are not prepared");
  if (forget_view.rows() != retain_view.rows() || forget_view.cols() != retain_view.cols()) {
    throw ShapeError("forget and retain feature views differ in shape");
  }
  FinetuneBatch b;
  std::unordered_map<NodeId, std::size_t> local;
  std::vector<std::uint8_t> from_forget;
  auto intern = [&](NodeId v, bool forget) {
    auto [it, inserted] = local.emplace(v, b.nodes.size());
    if (inserted) {
      b.nodes.push_back(v);
      from_forget.push_back(forget ? 1 : 0);
    }
    return it->second;
  };
  for (NodeId u : partition.ue) b.ue_local.push_back(intern(u, true));
  for (NodeId v : partition.hie) b.hie_local.push_back(intern(v, false));
  for (std::size_t a = 0; a < partition.hie.size(); ++a) {
    std::vector<std::size_t> pos, neg;
    for (NodeId v : partition.positives[a]) pos.push_back(intern(v, false));
    for (NodeId v : partition.negatives[a]) neg.push_back(intern(v, false));
    b.positive_local.push_back(std::move(pos));
    b.negative_local.push_back(std::move(neg));
  }
  b.rows = Matrix(b.nodes.size(), retain_view.cols());
  for (std::size_t i = 0; i < b.nodes.size(); ++i) {
    if (b.nodes[i] >= retain_view.rows()) throw IndexError("batch node out of range");
    auto src = (from_forget[i] ? forget_view : retain_view).row(b.nodes[i]);
    std::copy(src.begin(), src.end(), b.rows.row(i).begin());
  }
  return b;
}

// ---------------------------------------------------------------------------

void UnlearnConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must be in [0, 1]");
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
  if (!(kl_floor > 0.0)) throw ConfigError("kl floor must be > 0");
  optimizer.validate();
}

double loss_value(const LossBreakdown& b, LossTerm term) {
  switch (term) {
    case LossTerm::kLabel: return b.label;
    case LossTerm::kPrototype: return b.prototype;
    case LossTerm::kContrastive: return b.contrastive;
    case LossTerm::kForgetting: return b.forgetting();
    case LossTerm::kReasoning: return b.reasoning;
    case LossTerm::kTotal: return b.total;
  }
  return b.total;
}

namespace {

struct TermWeights {
  double label = 0.0, prototype = 0.0, contrastive = 0.0, reasoning = 0.0;
};

TermWeights weights_for(LossTerm term, double lambda) {
  switch (term) {
    case LossTerm::kLabel: return {1.0, 0.0, 0.0, 0.0};
    case LossTerm::kPrototype: return {0.0, 1.0, 0.0, 0.0};
    case LossTerm::kContrastive: return {0.0, 0.0, 1.0, 0.0};
    case LossTerm::kForgetting: return {1.0, 1.0, 1.0, 0.0};
    case LossTerm::kReasoning: return {0.0, 0.0, 0.0, 1.0};
    case LossTerm::kTotal: return {lambda, lambda, lambda, 1.0 - lambda};
  }
  return {};
}

// Scaled cosine similarity d(a, b) = cos(a, b) / tau and its gradients.
// A zero vector has similarity 0 and contributes no gradient.
struct Similarity {
  double value = 0.0;
  bool degenerate = true;
  double norm_a = 0.0, norm_b = 0.0, cosine = 0.0;
};

Similarity similarity(std::span<const double> a, std::span<const double> b, double tau) {
  Similarity s;
  s.norm_a = std::sqrt(squared_norm(a));
  s.norm_b = std::sqrt(squared_norm(b));
  if (s.norm_a == 0.0 || s.norm_b == 0.0) return s;
  s.degenerate = false;
  s.cosine = dot(a, b) / (s.norm_a * s.norm_b);
  s.value = s.cosine / tau;
  return s;
}

// Adds coeff · ∂d(a,b)/∂a into grad_a and coeff · ∂d(a,b)/∂b into grad_b.
void add_similarity_grad(const Similarity& s, std::span<const double> a, std::span<const double> b,
                         double tau, double coeff, std::span<double> grad_a,
                         std::span<double> grad_b) {
  if (s.degenerate || coeff == 0.0) return;
  const double inv = 1.0 / (s.norm_a * s.norm_b);
  const double ca = s.cosine / (s.norm_a * s.norm_a);
  const double cb = s.cosine / (s.norm_b * s.norm_b);
  const double k = coeff / tau;
  for (std::size_t j = 0; j < a.size(); ++j) {
    grad_a[j] += k * (b[j] * inv - a[j] * ca);
    grad_b[j] += k * (a[j] * inv - b[j] * cb);
  }
}

double log_sum_exp(std::span<const double> xs) {
  const double peak = *std::max_element(xs.begin(), xs.end());
  double total = 0.0;
  for (double x : xs) total += std::exp(x - peak);
  return peak + std::log(total);
}

}  // namespace

LossBreakdown evaluate_loss(const ModelParams& params, const EntityPartition& partition,
                            const FinetuneBatch& batch, const UnlearnConfig& config, LossTerm term,
                            ModelParams* grads) {
  if (!partition.prepared) throw StateError("partition caches are not prepared");
  if (partition.prototypes.prototypes.cols() != params.embed_dim()) {
    throw StateError("prototype width does not match the model's embedding width");
  }
  const TermWeights w = weights_for(term, config.lambda);
  const ForwardPass pass = forward(params, batch.rows);
  const std::size_t classes = params.classes;
  Matrix d_embed(batch.rows.rows(), params.embed_dim());
  Matrix d_logits(batch.rows.rows(), classes);
  LossBreakdown out;

  // Shuffled-label cross-entropy and foreign-prototype distance over UE.
  for (std::size_t i = 0; i < batch.ue_local.size(); ++i) {
    const std::size_t r = batch.ue_local[i];
    auto z = pass.logits.row(r);
    const auto target = static_cast<std::size_t>(partition.shuffled[i]);
    out.label += log_sum_exp(z) - z[target];
    if (w.label != 0.0) {
      auto p = pass.probs.row(r);
      auto d = d_logits.row(r);
      for (std::size_t j = 0; j < classes; ++j) d[j] += w.label * p[j];
      d[target] -= w.label;
    }

    auto h = pass.embed.row(r);
    auto proto = partition.prototypes.prototypes.row(
        static_cast<std::size_t>(partition.prototype_class[i]));
    double dist2 = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) dist2 += (h[j] - proto[j]) * (h[j] - proto[j]);
    const double dist = std::sqrt(dist2);
    out.prototype += dist;
    if (w.prototype != 0.0 && dist > 0.0) {
      auto d = d_embed.row(r);
      for (std::size_t j = 0; j < h.size(); ++j) d[j] += w.prototype * (h[j] - proto[j]) / dist;
    }
  }

  // Contrastive log-ratio per HIE anchor.
  std::vector<double> sims;
  std::vector<Similarity> parts;
  for (std::size_t a = 0; a < batch.hie_local.size(); ++a) {
    const auto& pos = batch.positive_local[a];
    const auto& neg = batch.negative_local[a];
    if (pos.empty()) continue;
    const std::size_t ra = batch.hie_local[a];
    auto ha = pass.embed.row(ra);
    sims.clear();
    parts.clear();
    for (std::size_t r : pos) parts.push_back(similarity(ha, pass.embed.row(r), config.tau));
    for (std::size_t r : neg) parts.push_back(similarity(ha, pass.embed.row(r), config.tau));
    for (const auto& s : parts) sims.push_back(s.value);
    const double lse_all = log_sum_exp(sims);
    const double lse_pos = log_sum_exp(std::span<const double>(sims).first(pos.size()));
    out.contrastive += lse_all - lse_pos;
    if (w.contrastive == 0.0) continue;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      double coeff = std::exp(sims[j] - lse_all);
      if (j < pos.size()) coeff -= std::exp(sims[j] - lse_pos);
      const std::size_t rb = j < pos.size() ? pos[j] : neg[j - pos.size()];
      add_similarity_grad(parts[j], ha, pass.embed.row(rb), config.tau, w.contrastive * coeff,
                          d_embed.row(ra), d_embed.row(rb));
    }
  }

  // Memory-based reasoning: weight decay plus KL(memory ‖ current) over HIE.
  out.reasoning = config.weight_decay * params.weight_squared_norm();
  for (std::size_t a = 0; a < batch.hie_local.size(); ++a) {
    const std::size_t r = batch.hie_local[a];
    auto p = pass.probs.row(r);
    auto y = partition.memory.row(a);
    double unclamped_mass = 0.0;
    for (std::size_t j = 0; j < classes; ++j) {
      const bool clamped = p[j] < config.kl_floor;
      if (y[j] > 0.0) out.reasoning += y[j] * (std::log(y[j]) - std::log(std::max(p[j], config.kl_floor)));
      if (!clamped) unclamped_mass += y[j];
    }
    if (w.reasoning == 0.0) continue;
    auto d = d_logits.row(r);
    for (std::size_t j = 0; j < classes; ++j) {
      d[j] += w.reasoning * p[j] * unclamped_mass;
      if (p[j] >= config.kl_floor) d[j] -= w.reasoning * y[j];
    }
  }

  out.total = config.lambda * out.forgetting() + (1.0 - config.lambda) * out.reasoning;

  if (grads != nullptr) {
    backward(params, pass, d_embed, d_logits, *grads);
    const double decay = 2.0 * w.reasoning * config.weight_decay;
    if (decay != 0.0) {
      for (std::size_t i = 0; i < params.w_emb.size(); ++i) {
        grads->w_emb.values()[i] += decay * params.w_emb.values()[i];
      }
      for (std::size_t i = 0; i < params.w_pre.size(); ++i) {
        grads->w_pre.values()[i] += decay * params.w_pre.values()[i];
      }
    }
  }
  return out;
}

ScalarLoss forgetting_loss(const ModelParams& params, const EntityPartition& partition,
                           const FinetuneBatch& batch, const UnlearnConfig& config) {
  ScalarLoss s{0.0, params.zeros_like()};
  s.value = evaluate_loss(params, partition, batch, config, LossTerm::kForgetting, &s.gradient)
                .forgetting();
  return s;
}

ScalarLoss reasoning_loss(const ModelParams& params, const EntityPartition& partition,
                          const FinetuneBatch& batch, const UnlearnConfig& config) {
  ScalarLoss s{0.0, params.zeros_like()};
  s.value =
      evaluate_loss(params, partition, batch, config, LossTerm::kReasoning, &s.gradient).reasoning;
  return s;
}

FinetuneResult finetune(ModelParams params, const EntityPartition& partition,
                        const Matrix& forget_view, const Matrix& retain_view,
                        const UnlearnConfig& config) {
  config.validate();
  const FinetuneBatch batch = make_batch(partition, forget_view, retain_view);

  FinetuneResult result;
  result.stats.rows_per_step = batch.rows.rows();
  result.stats.touched_nodes = batch.nodes;
  std::sort(result.stats.touched_nodes.begin(), result.stats.touched_nodes.end());

  Adam adam(params, config.optimizer);
  for (std::size_t epoch = 0; epoch < config.optimizer.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    ModelParams grads = params.zeros_like();
    const LossBreakdown b = evaluate_loss(params, partition, batch, config, LossTerm::kTotal, &grads);
    if (!std::isfinite(b.total)) {
      throw DataError("fine-tuning loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.log.push_back(b);
    adam.step(params, grads);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.stats.epoch_seconds.push_back(elapsed.count());
  }
  result.params = std::move(params);
  return result;
}

void write_loss_log(const std::filesystem::path& path, std::span<const LossBreakdown> log) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "epoch\tlabel\tprototype\tcontrastive\treasoning\ttotal\n" << std::setprecision(17);
  for (std::size_t e = 0; e < log.size(); ++e) {
    const auto& b = log[e];
    out << e << '\t' << b.label << '\t' << b.prototype << '\t' << b.contrastive << '\t'
        << b.reasoning << '\t' << b.total << '\n';
  }
}

}  // namespace sgu
