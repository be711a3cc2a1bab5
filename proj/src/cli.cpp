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

#include "sgu/cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgu/errors.hpp"
#include "sgu/eval.hpp"
#include "sgu/graph_io.hpp"
#include "sgu/random.hpp"

namespace sgu {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void flatten_into(const json& node, const std::string& prefix, std::map<std::string, json>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten_into(value, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  if (out.count(prefix)) throw ConfigError("config key '" + prefix + "' given twice");
  out[prefix] = node;
}

std::size_t as_count(const json& v) {
  if (!v.is_number_unsigned()) throw ConfigError("expected a non-negative integer");
  return v.get<std::size_t>();
}

double as_real(const json& v) {
  if (!v.is_number()) throw ConfigError("expected a number");
  return v.get<double>();
}

std::string as_text(const json& v) {
  if (!v.is_string()) throw ConfigError("expected a string");
  return v.get<std::string>();
}

std::vector<double> as_reals(const json& v) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError("expected a number or an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_real(x));
  return out;
}

struct PropagationKeys {
  std::string scheme = "sgc";
  std::size_t k = 3;
  double r = 0.5;
  double beta = 0.5;
  std::vector<double> weights;
};

using Setter = std::function<void(RunConfig&, PropagationKeys&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run_id", [](RunConfig& c, PropagationKeys&, const json& v) { c.run_id = as_text(v); }},
      {"seed", [](RunConfig& c, PropagationKeys&, const json& v) {
         if (!v.is_number_unsigned()) throw ConfigError("expected a non-negative integer");
         c.seed = v.get<std::uint64_t>();
       }},
      {"workers", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.workers = static_cast<unsigned>(std::max<std::size_t>(1, as_count(v)));
       }},
      {"paths.data", [](RunConfig& c, PropagationKeys&, const json& v) { c.data_dir = as_text(v); }},
      {"paths.request",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.request_path = as_text(v); }},
      {"gen.n", [](RunConfig& c, PropagationKeys&, const json& v) { c.sbm.n = as_count(v); }},
      {"gen.classes",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.sbm.classes = as_count(v); }},
      {"gen.p_in", [](RunConfig& c, PropagationKeys&, const json& v) { c.sbm.p_in = as_real(v); }},
      {"gen.p_out", [](RunConfig& c, PropagationKeys&, const json& v) { c.sbm.p_out = as_real(v); }},
      {"gen.feature_dim",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.sbm.feature_dim = as_count(v); }},
      {"gen.separation",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.sbm.separation = as_real(v); }},
      {"gen.train_fraction",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.sbm.train_fraction = as_real(v); }},
      {"propagation.scheme",
       [](RunConfig&, PropagationKeys& p, const json& v) { p.scheme = as_text(v); }},
      {"propagation.k", [](RunConfig&, PropagationKeys& p, const json& v) { p.k = as_count(v); }},
      {"propagation.r", [](RunConfig&, PropagationKeys& p, const json& v) { p.r = as_real(v); }},
      {"propagation.beta",
       [](RunConfig&, PropagationKeys& p, const json& v) { p.beta = as_real(v); }},
      {"propagation.weights",
       [](RunConfig&, PropagationKeys& p, const json& v) { p.weights = as_reals(v); }},
      {"model.mode", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.model.mode = parse_mode(as_text(v));
       }},
      {"model.hidden",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.pipeline.model.hidden = as_count(v); }},
      {"model.lr", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.train.learning_rate = as_real(v);
       }},
      {"model.weight_decay", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.train.weight_decay = as_real(v);
       }},
      {"model.epochs",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.pipeline.train.epochs = as_count(v); }},
      {"nim.strategy", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.nim.strategy = parse_hie_strategy(as_text(v));
       }},
      {"nim.theta",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.pipeline.nim.theta = as_real(v); }},
      {"nim.budget",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.pipeline.nim.budget = as_count(v); }},
      {"nim.budget_multiplier", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.nim.budget_multiplier = as_real(v);
       }},
      {"nim.mode", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.nim.mode = parse_seed_mode(as_text(v));
       }},
      {"nim.hops",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.pipeline.nim.khop_hops = as_count(v); }},
      {"unlearn.lambda",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.pipeline.unlearn.lambda = as_real(v); }},
      {"unlearn.tau",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.pipeline.unlearn.tau = as_real(v); }},
      {"unlearn.lr", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.unlearn.optimizer.learning_rate = as_real(v);
       }},
      {"unlearn.epochs", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.unlearn.optimizer.epochs = as_count(v);
       }},
      {"unlearn.weight_decay", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.pipeline.unlearn.weight_decay = as_real(v);
       }},
      {"unlearn.positives",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.pipeline.positives = as_count(v); }},
      {"unlearn.negatives",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.pipeline.negatives = as_count(v); }},
      {"unlearn.request_kind", [](RunConfig& c, PropagationKeys&, const json& v) {
         c.request_kind = parse_request_kind(as_text(v));
       }},
      {"unlearn.request_fraction",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.request_fraction = as_real(v); }},
      {"eval.mia_pool",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.mia_pool = as_count(v); }},
      {"eval.edge_ratios",
       [](RunConfig& c, PropagationKeys&, const json& v) { c.edge_ratios = as_reals(v); }},
  };
  return table;
}

PropagationConfig build_propagation(const PropagationKeys& p) {
  switch (parse_scheme(p.scheme)) {
    case Scheme::kSgc: return PropagationConfig::sgc(p.k, p.r);
    case Scheme::kS2gc: return PropagationConfig::s2gc(p.k, p.r);
    case Scheme::kGbp: return PropagationConfig::gbp(p.k, p.r, p.beta);
    case Scheme::kCustom: return PropagationConfig::custom(p.r, p.weights);
  }
  throw ConfigError("unknown propagation scheme");
}

void validate(const RunConfig& c) {
  c.sbm.validate();
  c.pipeline.propagation.validate();
  c.pipeline.train.validate();
  c.pipeline.unlearn.validate();
  if (c.pipeline.model.hidden == 0 && c.pipeline.model.mode == ModelMode::kMlp) {
    throw ConfigError("model.hidden must be >= 1 in mlp mode");
  }
  if (!(c.pipeline.nim.theta >= 0.0)) throw ConfigError("nim.theta must be >= 0");
  if (!(c.pipeline.nim.budget_multiplier >= 0.0)) {
    throw ConfigError("nim.budget_multiplier must be >= 0");
  }
  if (c.pipeline.nim.khop_hops == 0) throw ConfigError("nim.hops must be >= 1");
  if (!(c.request_fraction > 0.0 && c.request_fraction <= 1.0)) {
    throw ConfigError("unlearn.request_fraction must be in (0, 1]");
  }
  for (double rho : c.edge_ratios) {
    if (!(rho > 0.0 && rho <= 0.5)) throw ConfigError("eval.edge_ratios entries must be in (0, 0.5]");
  }
}

std::string replace_seed(std::string text, std::uint64_t seed) {
  const std::string token = "{seed}";
  for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token)) {
    text.replace(pos, token.size(), std::to_string(seed));
  }
  return text;
}

std::string ratio_text(double rho) {
  std::ostringstream s;
  s << rho;
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
}

class Recorder {
 public:
  Recorder(const RunConfig& config, const RunLayout& run, std::string stage)
      : writer_(run.metrics()), run_id_(config.run_id), seed_(config.seed), stage_(std::move(stage)) {}

  void operator()(const std::string& metric, double value) {
    writer_.write({run_id_, seed_, stage_, metric, value});
  }

 private:
  MetricsWriter writer_;
  std::string run_id_;
  std::uint64_t seed_;
  std::string stage_;
};

Graph load_run_graph(const RunLayout& run) {
  return load_dataset(DatasetPaths::in_directory(run.data));
}

// The request file of the run wins; otherwise the configured file; otherwise
// a deterministic sample.
UnlearnRequest resolve_request(const RunConfig& config, const RunLayout& run, const Graph& graph) {
  if (fs::exists(run.request())) return UnlearnRequest::load(run.request());
  if (!config.request_path.empty()) {
    return UnlearnRequest::load(replace_seed(config.request_path, config.seed));
  }
  return sample_node_request(graph, config.request_fraction,
                             Rng::derive(config.seed, kRequestStream), config.request_kind);
}

std::vector<NodeId> mia_pool(const RunConfig& config, const Graph& graph) {
  const auto& test = graph.test_nodes();
  if (config.mia_pool == 0 || config.mia_pool >= test.size()) return test;
  Rng rng(Rng::derive(config.seed, kMiaStream + 1));
  auto pool = rng.sample(test, config.mia_pool);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::uint64_t mia_seed(const RunConfig& config) { return Rng::derive(config.seed, kMiaStream); }

std::string method_name(const RunConfig& config) {
  return std::string("sgu-") + hie_strategy_name(config.pipeline.nim.strategy);
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig RunConfig::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  std::map<std::string, json> flat;
  flatten_into(doc, "", flat);

  RunConfig config;
  PropagationKeys prop;
  for (const auto& [key, value] : flat) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second(config, prop, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  config.pipeline.propagation = build_propagation(prop);
  config.set_seed(config.seed);
  validate(config);
  return config;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

void RunConfig::set_seed(std::uint64_t value) {
  seed = value;
  sbm.seed = value;
  pipeline.seed = value;
  pipeline.train.seed = value;
  pipeline.unlearn.optimizer.seed = value;
}

RunLayout RunLayout::make(const fs::path& dir, const RunConfig& config) {
  RunLayout run;
  run.dir = dir;
  run.data = config.data_dir.empty() ? dir / "data" : fs::path(replace_seed(config.data_dir, config.seed));
  return run;
}

// ---------------------------------------------------------------------------

void cmd_gen(const RunConfig& config, const RunLayout& run) {
  const Graph graph = generate_sbm(config.sbm);
  save_dataset(graph, DatasetPaths::in_directory(run.data));
}

void cmd_train(const RunConfig& config, const RunLayout& run) {
  const Graph graph = load_run_graph(run);
  const TrainedModel model = train_model(graph, config.pipeline);
  save_checkpoint(run.original(), model.params);
  Recorder record(config, run, "train");
  record("f1_train", f1_score(model.predicted, graph.labels(), graph.train_nodes()));
  record("f1_test", f1_score(model.predicted, graph.labels(), graph.test_nodes()));
  if (!model.loss_history.empty()) record("loss_final", model.loss_history.back());
}

void cmd_unlearn(const RunConfig& config, const RunLayout& run, const fs::path& checkpoint) {
  const Graph graph = load_run_graph(run);
  const fs::path source = checkpoint.empty() ? run.original() : checkpoint;
  const TrainedModel original = restore_model(graph, load_checkpoint(source), config.pipeline);

  UnlearnRequest request;
  if (!config.request_path.empty()) {
    request = UnlearnRequest::load(replace_seed(config.request_path, config.seed));
  } else {
    request = sample_node_request(graph, config.request_fraction,
                                  Rng::derive(config.seed, kRequestStream), config.request_kind);
  }
  request.validate(graph);
  const UnlearnOutcome outcome = unlearn(graph, original, request, config.pipeline);

  write_text(run.request(), request.to_json() + "\n");
  save_checkpoint(run.unlearned(), outcome.finetune.params);
  write_hie_csv(run.hie(), outcome.hie);
  write_loss_log(run.loss_log(), outcome.finetune.log);

  const auto predicted = predict_labels(outcome.finetune.params, outcome.retain_features);
  Recorder record(config, run, "unlearn");
  record("ue_size", static_cast<double>(outcome.ue.size()));
  record("hie_size", static_cast<double>(outcome.hie.entries.size()));
  if (!outcome.finetune.log.empty()) {
    record("loss_initial", outcome.finetune.log.front().total);
    record("loss_final", outcome.finetune.log.back().total);
  }
  record("f1_test", f1_score(predicted, graph.labels(), graph.test_nodes()));
  record("mia_auc", mia_attack(outcome.finetune.params, original.propagated, outcome.ue,
                               mia_pool(config, graph), mia_seed(config))
                        .auc);
}

void cmd_retrain(const RunConfig& config, const RunLayout& run) {
  const Graph graph = load_run_graph(run);
  const UnlearnRequest request = resolve_request(config, run, graph);
  request.validate(graph);
  const Graph after = apply_removal(graph, request);
  const TrainedModel model = retrain(after, config.pipeline);
  save_checkpoint(run.retrained(), model.params);

  const Matrix original_view = propagate_graph(graph, config.pipeline);
  Recorder record(config, run, "retrain");
  record("f1_test", f1_score(model.predicted, graph.labels(), after.test_nodes()));
  record("mia_auc", mia_attack(model.params, original_view, transform_request(request),
                               mia_pool(config, graph), mia_seed(config))
                        .auc);
}

void cmd_attack(const RunConfig& config, const RunLayout& run) {
  const Graph graph = load_run_graph(run);
  Recorder record(config, run, "attack");
  const std::vector<std::pair<std::string, fs::path>> models = {
      {"original", run.original()},
      {method_name(config), run.unlearned()},
      {"retrain", run.retrained()},
  };
  bool any = false;
  for (const auto& [name, path] : models) any |= fs::exists(path);
  if (any) {
    const UnlearnRequest request = resolve_request(config, run, graph);
    request.validate(graph);
    const auto ue = transform_request(request);
    const Matrix view = propagate_graph(graph, config.pipeline);
    const auto pool = mia_pool(config, graph);
    for (const auto& [name, path] : models) {
      if (!fs::exists(path)) continue;
      const TrainedModel model = restore_model(graph, load_checkpoint(path), config.pipeline);
      const AttackReport report = mia_attack(model.params, view, ue, pool, mia_seed(config));
      write_text(run.dir / ("mia_" + name + ".json"), report.to_json() + "\n");
      record("mia_auc." + name, report.auc);
    }
  }
  Recorder edge(config, run, "edge");
  for (double rho : config.edge_ratios) {
    const EdgeAttackReport report =
        edge_attack_run(graph, rho, config.pipeline, Rng::derive(config.seed, kEdgeAttackStream));
    const std::string tag = ratio_text(rho);
    write_text(run.dir / ("edge_attack_" + tag + ".json"), report.to_json() + "\n");
    edge("f1_clean@" + tag, report.f1_clean);
    edge("f1_poisoned@" + tag, report.f1_poisoned);
    edge("f1_unlearned@" + tag, report.f1_unlearned);
  }
  if (!any && config.edge_ratios.empty()) {
    throw StateError("nothing to attack: no checkpoints in '" + run.dir.string() +
                     "' and no eval.edge_ratios");
  }
}

void cmd_report(const fs::path& metrics, const fs::path& out_dir) {
  const auto records = fs::exists(metrics) ? read_metrics(metrics) : std::vector<MetricRecord>{};
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& r : records) groups[{r.stage, r.metric}].push_back(r.value);

  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto std_of = [&](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };

  std::ostringstream summary;
  summary << std::setprecision(12) << "stage,metric,count,mean,std\n";
  std::ostringstream auc;
  auc << std::setprecision(12) << "method,auc\n";
  std::map<std::string, std::map<double, double>> f1_series;
  for (const auto& [key, values] : groups) {
    const auto& [stage, metric] = key;
    summary << stage << ',' << metric << ',' << values.size() << ',' << mean_of(values) << ','
            << std_of(values) << '\n';
    if (stage == "attack" && metric.rfind("mia_auc.", 0) == 0) {
      auc << metric.substr(8) << ',' << mean_of(values) << '\n';
    }
    const auto at = metric.find('@');
    if (stage == "edge" && metric.rfind("f1_", 0) == 0 && at != std::string::npos) {
      try {
        f1_series[metric.substr(3, at - 3)][std::stod(metric.substr(at + 1))] = mean_of(values);
      } catch (const std::exception&) {
        throw DataError("malformed edge metric '" + metric + "'");
      }
    }
  }
  write_text(out_dir / "summary.csv", summary.str());
  write_text(out_dir / "auc_vs_method.csv", auc.str());
  for (const std::string series : {"clean", "poisoned", "unlearned"}) {
    std::ostringstream csv;
    csv << std::setprecision(12) << "rho,f1\n";
    for (const auto& [rho, value] : f1_series[series]) csv << rho << ',' << value << '\n';
    write_text(out_dir / ("f1_vs_rho_" + series + ".csv"), csv.str());
  }
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  auto number = [&](const std::string& part) -> std::uint64_t {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("bad seed range '" + text + "'");
    }
    return std::stoull(part);
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {number(text)};
  const auto lo = number(text.substr(0, dots));
  const auto hi = number(text.substr(dots + 2));
  if (hi < lo) throw ConfigError("seed range '" + text + "' is empty");
  if (hi - lo >= 100000) throw ConfigError("seed range '" + text + "' is too large");
  std::vector<std::uint64_t> out;
  for (auto s = lo; s <= hi; ++s) out.push_back(s);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void merge_shards(const fs::path& out_dir, const std::vector<fs::path>& shards) {
  std::ostringstream merged;
  for (const auto& shard : shards) {
    if (!fs::exists(shard)) continue;
    std::ifstream in(shard, std::ios::binary);
    merged << in.rdbuf();
  }
  write_text(out_dir / "metrics.jsonl", merged.str());
}

void print_error(std::ostream& err, const char* error_class, const std::string& message) {
  std::string line = message;
  std::replace(line.begin(), line.end(), '\n', ' ');
  err << "error: " << error_class << ": " << line << std::endl;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph unlearning pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = "runs";
  std::string seeds_text;
  std::uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--config", config_path, "JSON run configuration");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seeds", seeds_text, "seed batch a..b, one run directory per seed");

  auto* gen = app.add_subcommand("gen", "generate a synthetic SBM dataset");
  auto* train = app.add_subcommand("train", "train the original model");
  auto* unlearn_cmd = app.add_subcommand("unlearn", "apply a deletion request by fine-tuning");
  std::string checkpoint;
  unlearn_cmd->add_option("--checkpoint", checkpoint, "model to unlearn from");
  auto* retrain_cmd = app.add_subcommand("retrain", "retrain from scratch without the request");
  auto* attack = app.add_subcommand("attack", "membership and edge attacks");
  auto* report = app.add_subcommand("report", "aggregate a metrics file");
  std::string metrics_path;
  report->add_option("metrics", metrics_path, "metrics JSONL (default <out>/metrics.jsonl)");
  for (auto* sub : {gen, train, unlearn_cmd, retrain_cmd, attack, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "UsageError", e.what());
    return 1;
  }
  seed_given = seed_opt->count() > 0;

  try {
    if (report->parsed()) {
      const fs::path metrics = metrics_path.empty() ? fs::path(out_dir) / "metrics.jsonl"
                                                    : fs::path(metrics_path);
      cmd_report(metrics, out_dir);
      out << "report written to " << out_dir << '\n';
      return 0;
    }
    RunConfig base = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (seed_given && !seeds_text.empty()) throw ConfigError("--seed and --seeds are exclusive");

    auto run_one = [&](std::uint64_t s, const fs::path& dir) {
      RunConfig config = base;
      config.set_seed(s);
      const RunLayout run = RunLayout::make(dir, config);
      fs::create_directories(run.dir);
      if (gen->parsed()) cmd_gen(config, run);
      if (train->parsed()) cmd_train(config, run);
      if (unlearn_cmd->parsed()) cmd_unlearn(config, run, checkpoint);
      if (retrain_cmd->parsed()) cmd_retrain(config, run);
      if (attack->parsed()) cmd_attack(config, run);
    };

    if (seeds_text.empty()) {
      run_one(seed_given ? seed : base.seed, out_dir);
      return 0;
    }

    const auto seeds = parse_seed_range(seeds_text);
    std::vector<fs::path> dirs;
    for (auto s : seeds) dirs.push_back(fs::path(out_dir) / ("seed-" + std::to_string(s)));
    std::vector<std::exception_ptr> failures(seeds.size());
    const std::size_t lanes =
        std::min<std::size_t>(seeds.size(), std::max(1u, std::thread::hardware_concurrency()));
    {
      std::atomic<std::size_t> next{0};
      std::vector<std::jthread> pool;
      for (std::size_t lane = 0; lane < lanes; ++lane) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
              run_one(seeds[i], dirs[i]);
            } catch (...) {
              failures[i] = std::current_exception();
            }
          }
        });
      }
    }
    std::vector<fs::path> shards;
    for (const auto& d : dirs) shards.push_back(d / "metrics.jsonl");
    merge_shards(out_dir, shards);
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
    return 0;
  } catch (const Error& e) {
    print_error(err, e.error_class(), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    print_error(err, "IoError", e.what());
  } catch (const std::exception& e) {
    print_error(err, "InternalError", e.what());
  }
  return 1;
}

}  // namespace sgu
