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

#ifndef SGU_MODEL_HPP_
#define SGU_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sgu/graph.hpp"
#include "sgu/matrix.hpp"

namespace sgu {

// linear: logits = X W_pre + b_pre, and the embedding space is the logits.
// mlp:    h = ReLU(X W_emb + b_emb), logits = h W_pre + b_pre.
enum class ModelMode : std::uint8_t { kLinear = 0, kMlp = 1 };

const char* mode_name(ModelMode mode);
ModelMode parse_mode(const std::string& name);

/// Parameters of the decoupled head. Also used as the gradient container.
struct ModelParams {
  ModelMode mode = ModelMode::kMlp;
  std::size_t in_dim = 0;
  std::size_t hidden = 0;  // 0 in linear mode
  std::size_t classes = 0;
  Matrix w_emb;  // in_dim x hidden
  std::vector<double> b_emb;
  Matrix w_pre;  // (hidden or in_dim) x classes
  std::vector<double> b_pre;

  std::size_t embed_dim() const { return mode == ModelMode::kMlp ? hidden : classes; }
  std::size_t parameter_count() const;
  // Same shapes, all zeros.
  ModelParams zeros_like() const;
  // Tensors in declaration order: w_emb, b_emb (mlp only), w_pre, b_pre.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  // ‖W‖² over weight matrices (biases excluded).
  double weight_squared_norm() const;
  bool all_finite() const;

  bool operator==(const ModelParams&) const = default;
};

/// Weights and biases ~ U(-1/√fan_in, 1/√fan_in), deterministic in `seed`.
ModelParams init_model(std::size_t in_dim, std::size_t hidden, std::size_t classes,
                       ModelMode mode, std::uint64_t seed);

/// Activations kept for the backward pass.
struct ForwardPass {
  Matrix input;
  Matrix hidden_pre;  // mlp only
  Matrix embed;
  Matrix logits;
  Matrix probs;
};

ForwardPass forward(const ModelParams& params, const Matrix& x);
Matrix forward_embed(const ModelParams& params, const Matrix& x);
// Soft labels from embeddings. In linear mode the embeddings are the logits.
Matrix forward_predict(const ModelParams& params, const Matrix& embed);
Matrix predict_proba(const ModelParams& params, const Matrix& x);
std::vector<Label> predict_labels(const ModelParams& params, const Matrix& x);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

/// Accumulates parameter gradients into `grads` given upstream gradients with
/// respect to the embeddings (`d_embed`, may be empty) and the logits.
void backward(const ModelParams& params, const ForwardPass& pass, const Matrix& d_embed,
              const Matrix& d_logits, ModelParams& grads);

/// Full-batch Adam settings.
struct TrainConfig {
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  std::size_t epochs = 200;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate(bool allow_zero_epochs = true) const;
};

class Adam {
 public:
  Adam(const ModelParams& shape, const TrainConfig& config);
  void step(ModelParams& params, const ModelParams& grads);

 private:
  TrainConfig config_;
  ModelParams first_;
  ModelParams second_;
  std::size_t steps_ = 0;
};

/// Mean cross-entropy over `nodes` plus weight_decay·‖W‖². Gradients are
/// accumulated into `grads` when non-null.
double cross_entropy_loss(const ModelParams& params, const Matrix& x, std::span<const Label> labels,
                          std::span<const NodeId> nodes, double weight_decay, ModelParams* grads);

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_history;  // loss evaluated before each step
};

/// Full-batch training on the propagated features. Throws DataError when a
/// training node is unlabeled.
TrainResult train(ModelParams params, const Matrix& propagated, std::span<const Label> labels,
                  std::span<const NodeId> train_nodes, const TrainConfig& config);

/// Loss closure for gradient checking: returns the loss and accumulates the
/// analytic gradient into `grads` when it is non-null.
using LossFunction = std::function<double(const ModelParams&, ModelParams* grads)>;

/// Max relative error between analytic and central-difference gradients over
/// `probes` random coordinates (step 1e-6). The relative error uses
/// max(|analytic|, |numeric|, 1e-4) as denominator.
double grad_check(const ModelParams& params, const LossFunction& loss, std::uint64_t probe_seed,
                  std::size_t probes = 20);

// Checkpoint: "GUWT", mode byte, u64 in_dim/hidden/classes, then tensors in
// declaration order as f64, all little-endian.
std::string serialize_checkpoint(const ModelParams& params);
ModelParams deserialize_checkpoint(const std::string& bytes);
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace sgu

#endif  // SGU_MODEL_HPP_
