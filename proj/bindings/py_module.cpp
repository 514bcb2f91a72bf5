// Python bindings for the core pipeline: synthetic data, walk caches,
// training, and evaluation. Tensors cross the boundary as numpy copies.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dygssm/config.hpp"
#include "dygssm/errors.hpp"
#include "dygssm/eval.hpp"
#include "dygssm/graph.hpp"
#include "dygssm/io.hpp"
#include "dygssm/model.hpp"
#include "dygssm/ssm.hpp"
#include "dygssm/synthetic.hpp"
#include "dygssm/trainer.hpp"
#include "dygssm/walk.hpp"

namespace py = pybind11;
using namespace dygssm;

namespace {

py::array_t<double> to_numpy(const Tensor& t) {
  py::array_t<double> out({t.rows(), t.cols()});
  auto buf = out.mutable_unchecked<2>();
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j) buf(i, j) = t.at(i, j);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dynamic-graph link prediction core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("hippo_matrix", [](int n) { return to_numpy(hippo_matrix(n)); }, py::arg("n"),
        "Lower-triangular projection matrix used by the gradient state update");
  m.def("dynamic_weight", &dynamic_weight, py::arg("loss"), py::arg("eps") = 1e-8);

  py::class_<DynamicGraph>(m, "Graph")
      .def_readonly("node_count", &DynamicGraph::node_count)
      .def("snapshot_count", &DynamicGraph::snapshot_count)
      .def("edges", [](const DynamicGraph& g, int t) {
        if (t < 0 || t >= g.snapshot_count()) throw py::index_error("snapshot out of range");
        return g.snapshots[t].edges;
      });

  m.def(
      "generate_synthetic",
      [](int nodes, int snapshots, int planted, int period, int persistence, double base_rate,
         double noise_rate, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.nodes = nodes;
        spec.snapshots = snapshots;
        spec.planted_count = planted;
        spec.period = period;
        spec.persistence = persistence;
        spec.base_rate = base_rate;
        spec.noise_rate = noise_rate;
        SyntheticData data = generate_synthetic(spec, seed);
        return py::make_tuple(std::move(data.graph), data.planted);
      },
      py::arg("nodes") = 60, py::arg("snapshots") = 20, py::arg("planted") = 40,
      py::arg("period") = 1, py::arg("persistence") = 1, py::arg("base_rate") = 0.0,
      py::arg("noise_rate") = 0.0, py::arg("seed") = 1,
      "Periodic planted-pattern graph; returns (graph, planted_edges)");

  m.def(
      "load_graph",
      [](const std::string& path, int snapshots, bool cumulative) {
        EdgeData data = load_edge_csv(path);
        return partition_snapshots(data.edges, snapshots, cumulative);
      },
      py::arg("path"), py::arg("snapshots"), py::arg("cumulative") = false,
      "Edge CSV -> time-binned snapshot graph");

  py::class_<WalkCache>(m, "WalkCache")
      .def_readonly("top_k", &WalkCache::top_k)
      .def("snapshot_count", &WalkCache::snapshot_count)
      .def("summary", &WalkCache::summary, py::arg("t"), py::arg("u"));

  m.def(
      "build_walk_cache",
      [](const DynamicGraph& g, double p, double q, int walks_per_node, int walk_length,
         int top_k, std::uint64_t seed) {
        WalkConfig cfg;
        cfg.p = p;
        cfg.q = q;
        cfg.walks_per_node = walks_per_node;
        cfg.walk_length = walk_length;
        cfg.top_k = top_k;
        cfg.validate();
        return build_cache(g, cfg, seed);
      },
      py::arg("graph"), py::arg("p") = 1.0, py::arg("q") = 2.0,
      py::arg("walks_per_node") = 50, py::arg("walk_length") = 5, py::arg("top_k") = 5,
      py::arg("seed") = 1);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("node_count", &ModelConfig::node_count)
      .def_readwrite("feature_dim", &ModelConfig::feature_dim)
      .def_readwrite("hidden_dim", &ModelConfig::hidden_dim)
      .def_readwrite("top_k", &ModelConfig::top_k)
      .def_readwrite("light_gru", &ModelConfig::light_gru)
      .def_readwrite("activation", &ModelConfig::activation)
      .def_readwrite("feature_mode", &ModelConfig::feature_mode);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("delta_t", &TrainConfig::delta_t)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("patience", &TrainConfig::patience)
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("eta", &TrainConfig::eta)
      .def_readwrite("weight_eps", &TrainConfig::weight_eps)
      .def_readwrite("ssm_block", &TrainConfig::ssm_block)
      .def_readwrite("ssm_state_persist", &TrainConfig::ssm_state_persist)
      .def_readwrite("no_ssm", &TrainConfig::no_ssm)
      .def_readwrite("no_global", &TrainConfig::no_global)
      .def_readwrite("no_cross_attention", &TrainConfig::no_cross_attention)
      .def_readwrite("random_window", &TrainConfig::random_window)
      .def_readwrite("k_neg", &TrainConfig::k_neg)
      .def_readwrite("val_k_neg", &TrainConfig::val_k_neg)
      .def_readwrite("train_fraction", &TrainConfig::train_fraction)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<ModelParams>(m, "ModelParams")
      .def("names", &ModelParams::names)
      .def("tensor", [](const ModelParams& p, const std::string& name) {
        return to_numpy(p.get(name));
      });

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("params", &TrainResult::params)
      .def_readonly("best_val_mrr", &TrainResult::best_val_mrr)
      .def_readonly("best_epoch", &TrainResult::best_epoch)
      .def_readonly("epochs_run", &TrainResult::epochs_run)
      .def_readonly("train_snapshots", &TrainResult::train_snapshots)
      .def("history_csv", [](const TrainResult& r) { return history_csv(r.history); });

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("accuracy", &MetricsReport::accuracy)
      .def_readonly("auc", &MetricsReport::auc)
      .def_readonly("average_precision", &MetricsReport::average_precision)
      .def_readonly("mrr", &MetricsReport::mrr)
      .def_readonly("recall_at_10", &MetricsReport::recall_at_10)
      .def_readonly("k_neg", &MetricsReport::k_neg)
      .def_readonly("ranking_cases", &MetricsReport::ranking_cases)
      .def("to_json", &MetricsReport::to_json);

  py::class_<Trainer>(m, "Trainer")
      .def(py::init<DynamicGraph, WalkCache, ModelConfig, TrainConfig>(), py::arg("graph"),
           py::arg("cache"), py::arg("model"), py::arg("train"))
      .def("train_snapshots", &Trainer::train_snapshots)
      .def("train", &Trainer::train, py::call_guard<py::gil_scoped_release>())
      .def("embeddings_at",
           [](const Trainer& t, int snapshot, const ModelParams& params) {
             return to_numpy(t.embeddings_at(snapshot, params));
           })
      .def("evaluate_test", &Trainer::evaluate_test, py::arg("params"), py::arg("k_neg"),
           py::arg("seed"), py::call_guard<py::gil_scoped_release>());

  m.def("save_checkpoint", &save_checkpoint, py::arg("params"), py::arg("path"));
  m.def("load_checkpoint", &load_checkpoint, py::arg("path"));
}
