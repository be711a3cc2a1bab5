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


#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "sgu/cli.hpp"
#include "sgu/datagen.hpp"
#include "sgu/errors.hpp"
#include "sgu/eval.hpp"
#include "sgu/graph.hpp"
#include "sgu/graph_io.hpp"
#include "sgu/model.hpp"
#include "sgu/nim.hpp"
#include "sgu/pipeline.hpp"

namespace py = pybind11;
using namespace sgu;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

Matrix from_numpy(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-d array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.values().begin());
  return m;
}

PipelineConfig pipeline_config(const std::string& json) { return RunConfig::from_json(json).pipeline; }

py::tuple cli(const std::vector<std::string>& args) {
  std::vector<std::string> owned{"sgu"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : owned) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_sgu, m) {
  m.doc() = "Graph unlearning engine: influence-based HIE selection and fine-tuning.";

  static py::exception<Error> error(m, "SguError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(e.error_class()) + ": " + e.what()).c_str());
    }
  });

  py::class_<Graph>(m, "Graph")
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly("num_classes", &Graph::num_classes)
      .def_property_readonly("features", [](const Graph& g) { return to_numpy(g.features()); })
      .def_property_readonly("labels",
                             [](const Graph& g) { return std::vector<Label>(g.labels().begin(), g.labels().end()); })
      .def_property_readonly("train_nodes", &Graph::train_nodes)
      .def_property_readonly("test_nodes", &Graph::test_nodes)
      .def("edges", &Graph::edge_list)
      .def("has_edge", &Graph::has_edge, py::arg("u"), py::arg("v"));

  m.def(
      "build_graph",
      [](std::size_t n, const std::vector<Edge>& edges, const Array& features, std::vector<Label> labels,
         const std::vector<NodeId>& train, const std::vector<NodeId>& test, std::size_t classes) {
        return build_graph(n, edges, from_numpy(features), std::move(labels), train, test, classes);
      },
      py::arg("n"), py::arg("edges"), py::arg("features"), py::arg("labels"), py::arg("train"),
      py::arg("test"), py::arg("classes") = 0);

  m.def(
      "generate_sbm",
      [](std::size_t n, std::size_t classes, double p_in, double p_out, std::size_t feature_dim,
         double separation, double train_fraction, std::uint64_t seed) {
        SbmSpec spec{n, classes, p_in, p_out, feature_dim, separation, train_fraction, seed};
        return generate_sbm(spec);
      },
      py::arg("n") = 400, py::arg("classes") = 4, py::arg("p_in") = 0.05, py::arg("p_out") = 0.005,
      py::arg("feature_dim") = 16, py::arg("separation") = 2.0, py::arg("train_fraction") = 0.8,
      py::arg("seed") = 0);

  m.def(
      "load_dataset",
      [](const std::string& dir) { return load_dataset(DatasetPaths::in_directory(dir)); },
      py::arg("directory"));

  py::class_<PropagationConfig>(m, "Propagation")
      .def_static("sgc", &PropagationConfig::sgc, py::arg("k") = 3, py::arg("r") = 0.5)
      .def_static("s2gc", &PropagationConfig::s2gc, py::arg("k") = 3, py::arg("r") = 0.5)
      .def_static("gbp", &PropagationConfig::gbp, py::arg("k") = 3, py::arg("r") = 0.5,
                  py::arg("beta") = 0.5)
      .def_static("custom", &PropagationConfig::custom, py::arg("r"), py::arg("weights"))
      .def_readonly("k", &PropagationConfig::k)
      .def_readonly("r", &PropagationConfig::r)
      .def_readonly("weights", &PropagationConfig::weights);

  m.def(
      "propagate",
      [](const Graph& g, const PropagationConfig& config, std::optional<Array> x) {
        SparseOperator op = normalized_adjacency(g, config.r);
        return to_numpy(propagate(op, x ? from_numpy(*x) : g.features(), config));
      },
      py::arg("graph"), py::arg("propagation"), py::arg("x") = py::none());

  m.def(
      "select_hie",
      [](const Graph& g, const PropagationConfig& config, const std::vector<NodeId>& ue,
         const Array& soft_labels, double theta, std::size_t budget, const std::string& mode) {
        SparseOperator op = normalized_adjacency(g, config.r);
        HieSelection s = select_hie(op, config, ue, from_numpy(soft_labels), theta, budget,
                                    parse_seed_mode(mode));
        std::vector<std::pair<NodeId, double>> out;
        for (const auto& e : s.entries) out.emplace_back(e.node, e.score);
        return out;
      },
      py::arg("graph"), py::arg("propagation"), py::arg("ue"), py::arg("soft_labels"),
      py::arg("theta"), py::arg("budget"), py::arg("mode") = "expanding");

  m.def("khop_hie", [](const Graph& g, const std::vector<NodeId>& ue, std::size_t hops) {
    return khop_hie(g, ue, hops);
  }, py::arg("graph"), py::arg("ue"), py::arg("hops") = 2);

  py::class_<TrainedModel>(m, "Model")
      .def_property_readonly("propagated", [](const TrainedModel& t) { return to_numpy(t.propagated); })
      .def_property_readonly("soft_labels", [](const TrainedModel& t) { return to_numpy(t.soft_labels); })
      .def_readonly("predicted", &TrainedModel::predicted)
      .def_readonly("loss_history", &TrainedModel::loss_history)
      .def("predict_proba",
           [](const TrainedModel& t, const Array& x) { return to_numpy(predict_proba(t.params, from_numpy(x))); })
      .def("checkpoint", [](const TrainedModel& t) { return py::bytes(serialize_checkpoint(t.params)); });

  m.def(
      "train_model",
      [](const Graph& g, const std::string& config) { return train_model(g, pipeline_config(config)); },
      py::arg("graph"), py::arg("config") = "{}",
      "Trains the head; `config` is a JSON run configuration.");

  m.def(
      "unlearn",
      [](const Graph& g, const TrainedModel& original, const std::vector<NodeId>& nodes,
         const std::string& config) {
        PipelineConfig cfg = pipeline_config(config);
        UnlearnRequest request;
        request.nodes = nodes;
        UnlearnOutcome out = unlearn(g, original, request, cfg);
        TrainedModel updated = restore_model(out.graph_after, out.finetune.params, cfg);
        std::vector<double> totals;
        for (const auto& l : out.finetune.log) totals.push_back(l.total);
        py::dict result;
        result["ue"] = out.ue;
        result["hie"] = out.hie.nodes();
        result["loss"] = totals;
        result["graph"] = out.graph_after;
        result["model"] = updated;
        return result;
      },
      py::arg("graph"), py::arg("model"), py::arg("nodes"), py::arg("config") = "{}");

  m.def(
      "mia_auc",
      [](const TrainedModel& model, const std::vector<NodeId>& members,
         const std::vector<NodeId>& pool, const Array& features, std::uint64_t seed) {
        return mia_attack(model.params, from_numpy(features), members, pool, seed).auc;
      },
      py::arg("model"), py::arg("members"), py::arg("pool"), py::arg("features"), py::arg("seed") = 0);

  m.def(
      "auc",
      [](const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
        return auc(scores, labels);
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "f1_score",
      [](const std::vector<Label>& predictions, const std::vector<Label>& labels,
         const std::vector<NodeId>& mask) { return f1_score(predictions, labels, mask); },
      py::arg("predictions"), py::arg("labels"), py::arg("mask"));

  m.def("run_cli", &cli, py::arg("args"),
        "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
