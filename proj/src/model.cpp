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

#include "sgu/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include "sgu/errors.hpp"
#include "sgu/graph_io.hpp"
#include "sgu/random.hpp"

namespace sgu {

namespace {

constexpr char kCheckpointMagic[4] = {'G', 'U', 'W', 'T'};

void add_bias(Matrix& m, const std::vector<double>& bias) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += bias[j];
  }
}

void accumulate_column_sums(const Matrix& m, std::vector<double>& out) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
}

void accumulate(Matrix& dst, const Matrix& src) {
  auto& d = dst.values();
  const auto& s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

void check_input(const ModelParams& params, const Matrix& x) {
  if (x.cols() != params.in_dim) {
    throw ShapeError("model expects " + std::to_string(params.in_dim) + " input columns, got " +
                     std::to_string(x.cols()));
  }
}

}  // namespace

const char* mode_name(ModelMode mode) { return mode == ModelMode::kMlp ? "mlp" : "linear"; }

ModelMode parse_mode(const std::string& name) {
  if (name == "mlp") return ModelMode::kMlp;
  if (name == "linear") return ModelMode::kLinear;
  throw ConfigError("unknown model mode '" + name + "'");
}

std::size_t ModelParams::parameter_count() const {
  return w_emb.size() + b_emb.size() + w_pre.size() + b_pre.size();
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  z.mode = mode;
  z.in_dim = in_dim;
  z.hidden = hidden;
  z.classes = classes;
  z.w_emb = Matrix(w_emb.rows(), w_emb.cols());
  z.b_emb.assign(b_emb.size(), 0.0);
  z.w_pre = Matrix(w_pre.rows(), w_pre.cols());
  z.b_pre.assign(b_pre.size(), 0.0);
  return z;
}

std::vector<std::span<double>> ModelParams::tensors() {
  std::vector<std::span<double>> out;
  if (mode == ModelMode::kMlp) {
    out.emplace_back(w_emb.values());
    out.emplace_back(b_emb);
  }
  out.emplace_back(w_pre.values());
  out.emplace_back(b_pre);
  return out;
}

std::vector<std::span<const double>> ModelParams::tensors() const {
  std::vector<std::span<const double>> out;
  if (mode == ModelMode::kMlp) {
    out.emplace_back(w_emb.values());
    out.emplace_back(b_emb);
  }
  out.emplace_back(w_pre.values());
  out.emplace_back(b_pre);
  return out;
}

double ModelParams::weight_squared_norm() const {
  return squared_norm(w_emb.values()) + squared_norm(w_pre.values());
}

bool ModelParams::all_finite() const {
  for (auto t : tensors()) {
    for (double v : t) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

ModelParams init_model(std::size_t in_dim, std::size_t hidden, std::size_t classes,
                       ModelMode mode, std::uint64_t seed) {
  if (in_dim == 0 || classes == 0 || (mode == ModelMode::kMlp && hidden == 0)) {
    throw ConfigError("model dimensions must be >= 1");
  }
  Rng rng(seed);
  ModelParams p;
  p.mode = mode;
  p.in_dim = in_dim;
  p.classes = classes;
  auto fill = [&](std::span<double> values, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : values) v = rng.uniform(-bound, bound);
  };
  std::size_t pre_in = in_dim;
  if (mode == ModelMode::kMlp) {
    p.hidden = hidden;
    p.w_emb = Matrix(in_dim, hidden);
    p.b_emb.assign(hidden, 0.0);
    fill(p.w_emb.values(), in_dim);
    fill(p.b_emb, in_dim);
    pre_in = hidden;
  }
  p.w_pre = Matrix(pre_in, classes);
  p.b_pre.assign(classes, 0.0);
  fill(p.w_pre.values(), pre_in);
  fill(p.b_pre, pre_in);
  return p;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto in = logits.row(i);
    auto dst = out.row(i);
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      dst[j] = std::exp(in[j] - peak);
      total += dst[j];
    }
    for (double& v : dst) v /= total;
  }
  return out;
}

ForwardPass forward(const ModelParams& params, const Matrix& x) {
  check_input(params, x);
  ForwardPass pass;
  pass.input = x;
  if (params.mode == ModelMode::kMlp) {
    pass.hidden_pre = matmul(x, params.w_emb);
    add_bias(pass.hidden_pre, params.b_emb);
    pass.embed = pass.hidden_pre;
    for (double& v : pass.embed.values()) v = std::max(v, 0.0);
    pass.logits = matmul(pass.embed, params.w_pre);
    add_bias(pass.logits, params.b_pre);
  } else {
    pass.logits = matmul(x, params.w_pre);
    add_bias(pass.logits, params.b_pre);
    pass.embed = pass.logits;
  }
  pass.probs = softmax_rows(pass.logits);
  return pass;
}

Matrix forward_embed(const ModelParams& params, const Matrix& x) {
  check_input(params, x);
  Matrix out;
  if (params.mode == ModelMode::kMlp) {
    out = matmul(x, params.w_emb);
    add_bias(out, params.b_emb);
    for (double& v : out.values()) v = std::max(v, 0.0);
  } else {
    out = matmul(x, params.w_pre);
    add_bias(out, params.b_pre);
  }
  return out;
}

Matrix forward_predict(const ModelParams& params, const Matrix& embed) {
  if (embed.cols() != params.embed_dim()) {
    throw ShapeError("embedding width " + std::to_string(embed.cols()) + ", expected " +
                     std::to_string(params.embed_dim()));
  }
  if (params.mode == ModelMode::kLinear) return softmax_rows(embed);
  Matrix logits = matmul(embed, params.w_pre);
  add_bias(logits, params.b_pre);
  return softmax_rows(logits);
}

Matrix predict_proba(const ModelParams& params, const Matrix& x) {
  return forward_predict(params, forward_embed(params, x));
}

std::vector<Label> predict_labels(const ModelParams& params, const Matrix& x) {
  const Matrix probs = predict_proba(params, x);
  std::vector<Label> out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    auto row = probs.row(i);
    out[i] = static_cast<Label>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

void backward(const ModelParams& params, const ForwardPass& pass, const Matrix& d_embed,
              const Matrix& d_logits, ModelParams& grads) {
  if (params.mode == ModelMode::kLinear) {
    Matrix d_total = d_logits;
    if (!d_embed.empty()) accumulate(d_total, d_embed);
    accumulate(grads.w_pre, matmul_tn(pass.input, d_total));
    accumulate_column_sums(d_total, grads.b_pre);
    return;
  }
  accumulate(grads.w_pre, matmul_tn(pass.embed, d_logits));
  accumulate_column_sums(d_logits, grads.b_pre);
  Matrix d_hidden = matmul_nt(d_logits, params.w_pre);
  if (!d_embed.empty()) accumulate(d_hidden, d_embed);
  auto& dh = d_hidden.values();
  const auto& pre = pass.hidden_pre.values();
  for (std::size_t i = 0; i < dh.size(); ++i) {
    if (pre[i] <= 0.0) dh[i] = 0.0;
  }
  accumulate(grads.w_emb, matmul_tn(pass.input, d_hidden));
  accumulate_column_sums(d_hidden, grads.b_emb);
}

// ---------------------------------------------------------------------------

void TrainConfig::validate(bool allow_zero_epochs) const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be finite and >= 0");
  }
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
  if (!allow_zero_epochs && epochs == 0) throw ConfigError("epochs must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0)) {
    throw ConfigError("invalid Adam moment coefficients");
  }
}

Adam::Adam(const ModelParams& shape, const TrainConfig& config)
    : config_(config), first_(shape.zeros_like()), second_(shape.zeros_like()) {}

void Adam::step(ModelParams& params, const ModelParams& grads) {
  ++steps_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = first_.tensors();
  auto v = second_.tensors();
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (std::size_t i = 0; i < p[t].size(); ++i) {
      m[t][i] = config_.beta1 * m[t][i] + (1.0 - config_.beta1) * g[t][i];
      v[t][i] = config_.beta2 * v[t][i] + (1.0 - config_.beta2) * g[t][i] * g[t][i];
      const double m_hat = m[t][i] / c1;
      const double v_hat = v[t][i] / c2;
      p[t][i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

namespace {

double mean_cross_entropy(const ModelParams& params, const Matrix& rows,
                          std::span<const Label> row_labels, double weight_decay,
                          ModelParams* grads) {
  const ForwardPass pass = forward(params, rows);
  const double scale = rows.rows() == 0 ? 0.0 : 1.0 / static_cast<double>(rows.rows());
  double loss = 0.0;
  Matrix d_logits(rows.rows(), params.classes);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    auto z = pass.logits.row(i);
    const double peak = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double v : z) total += std::exp(v - peak);
    const auto y = static_cast<std::size_t>(row_labels[i]);
    loss -= (z[y] - peak - std::log(total)) * scale;
    auto d = d_logits.row(i);
    auto p = pass.probs.row(i);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = p[j] * scale;
    d[y] -= scale;
  }
  loss += weight_decay * params.weight_squared_norm();
  if (grads != nullptr) {
    backward(params, pass, Matrix(), d_logits, *grads);
    for (std::size_t i = 0; i < params.w_emb.size(); ++i) {
      grads->w_emb.values()[i] += 2.0 * weight_decay * params.w_emb.values()[i];
    }
    for (std::size_t i = 0; i < params.w_pre.size(); ++i) {
      grads->w_pre.values()[i] += 2.0 * weight_decay * params.w_pre.values()[i];
    }
  }
  return loss;
}

std::vector<Label> checked_labels(std::span<const Label> labels, std::span<const NodeId> nodes,
                                  std::size_t classes) {
  std::vector<Label> out;
  out.reserve(nodes.size());
  for (NodeId u : nodes) {
    if (u >= labels.size()) throw IndexError("node " + std::to_string(u) + " has no label slot");
    const Label y = labels[u];
    if (y == kUnlabeled) throw DataError("training node " + std::to_string(u) + " is unlabeled");
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw DataError("label " + std::to_string(y) + " of node " + std::to_string(u) +
                      " outside the model's classes");
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace

double cross_entropy_loss(const ModelParams& params, const Matrix& x, std::span<const Label> labels,
                          std::span<const NodeId> nodes, double weight_decay, ModelParams* grads) {
  const auto row_labels = checked_labels(labels, nodes, params.classes);
  return mean_cross_entropy(params, gather_rows(x, nodes), row_labels, weight_decay, grads);
}

TrainResult train(ModelParams params, const Matrix& propagated, std::span<const Label> labels,
                  std::span<const NodeId> train_nodes, const TrainConfig& config) {
  config.validate();
  const auto row_labels = checked_labels(labels, train_nodes, params.classes);
  const Matrix rows = gather_rows(propagated, train_nodes);
  TrainResult result;
  Adam adam(params, config);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    ModelParams grads = params.zeros_like();
    const double loss = mean_cross_entropy(params, rows, row_labels, config.weight_decay, &grads);
    if (!std::isfinite(loss)) {
      throw DataError("training loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.loss_history.push_back(loss);
    adam.step(params, grads);
  }
  result.params = std::move(params);
  return result;
}

double grad_check(const ModelParams& params, const LossFunction& loss, std::uint64_t probe_seed,
                  std::size_t probes) {
  constexpr double kStep = 1e-6;
  ModelParams grads = params.zeros_like();
  loss(params, &grads);

  const std::size_t total = params.parameter_count();
  std::vector<std::size_t> coords(total);
  std::iota(coords.begin(), coords.end(), 0);
  Rng rng(probe_seed);
  coords = rng.sample(std::move(coords), std::min(probes, total));

  auto locate = [](auto tensors, std::size_t flat) {
    for (auto t : tensors) {
      if (flat < t.size()) return &t[flat];
      flat -= t.size();
    }
    return static_cast<decltype(&tensors[0][0])>(nullptr);
  };

  double worst = 0.0;
  for (std::size_t c : coords) {
    ModelParams probe = params;
    double* slot = locate(probe.tensors(), c);
    const double original = *slot;
    *slot = original + kStep;
    const double up = loss(probe, nullptr);
    *slot = original - kStep;
    const double down = loss(probe, nullptr);
    const double numeric = (up - down) / (2.0 * kStep);
    const double analytic = *locate(grads.tensors(), c);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  }
  return worst;
}

// ---------------------------------------------------------------------------

std::string serialize_checkpoint(const ModelParams& params) {
  std::ostringstream out(std::ios::binary);
  out.write(kCheckpointMagic, 4);
  out.put(static_cast<char>(params.mode));
  write_u64_le(out, params.in_dim);
  write_u64_le(out, params.hidden);
  write_u64_le(out, params.classes);
  for (auto t : params.tensors()) {
    for (double v : t) write_f64_le(out, v);
  }
  return out.str();
}

ModelParams deserialize_checkpoint(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || !std::equal(magic, magic + 4, kCheckpointMagic)) {
    throw CheckpointError("not a GUWT checkpoint");
  }
  const int mode_byte = in.get();
  if (mode_byte != 0 && mode_byte != 1) throw CheckpointError("unknown model mode byte");
  ModelParams p;
  p.mode = static_cast<ModelMode>(mode_byte);
  try {
    p.in_dim = read_u64_le(in);
    p.hidden = read_u64_le(in);
    p.classes = read_u64_le(in);
    const std::size_t pre_in = p.mode == ModelMode::kMlp ? p.hidden : p.in_dim;
    if (p.mode == ModelMode::kMlp) {
      p.w_emb = Matrix(p.in_dim, p.hidden);
      p.b_emb.assign(p.hidden, 0.0);
    }
    p.w_pre = Matrix(pre_in, p.classes);
    p.b_pre.assign(p.classes, 0.0);
    for (auto t : p.tensors()) {
      for (double& v : t) v = read_f64_le(in);
    }
  } catch (const IoError&) {
    throw CheckpointError("truncated checkpoint");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing checkpoint bytes");
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  const std::string bytes = serialize_checkpoint(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace sgu
