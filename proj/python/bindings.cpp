#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "flipbound/bounds.hpp"
#include "flipbound/errors.hpp"
#include "flipbound/exact.hpp"
#include "flipbound/harness.hpp"
#include "flipbound/lower.hpp"
#include "flipbound/random.hpp"
#include "flipbound/reduction.hpp"
#include "flipbound/sanitize.hpp"
#include "flipbound/trainer.hpp"
#include "flipbound/upper.hpp"

namespace py = pybind11;
using namespace flipbound;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<int, py::array::c_style | py::array::forcecast>;

Dataset make_dataset(const Matrix& x, const Labels& y) {
  if (x.ndim() != 2) throw InputError("X must be two-dimensional");
  if (y.ndim() != 1 || y.shape(0) != x.shape(0)) throw InputError("y must have one entry per row of X");
  const auto m = static_cast<std::size_t>(x.shape(0)), d = static_cast<std::size_t>(x.shape(1));
  std::vector<double> f(x.data(), x.data() + m * d);
  std::vector<Label> l(y.data(), y.data() + m);
  return Dataset(d, std::move(f), std::move(l));
}

TestTarget make_target(const std::vector<double>& x, int y) {
  TestTarget t{x, y};
  return t;
}

py::array_t<double> features_of(const Dataset& d) {
  py::array_t<double> out({d.size(), d.dim()});
  std::copy(d.features().begin(), d.features().end(), out.mutable_data());
  return out;
}

py::array_t<int> labels_of(const Dataset& d) {
  py::array_t<int> out(d.size());
  std::copy(d.labels().begin(), d.labels().end(), out.mutable_data());
  return out;
}

MilpParams milp_params(double big_m, double eps, std::size_t node_budget) {
  MilpParams p;
  p.big_m = big_m;
  p.eps = eps;
  p.node_budget = node_budget;
  return p;
}

TrainConfig train_config(const std::string& loss, double l2, std::size_t epochs,
                         std::optional<double> eta0, std::uint64_t seed, bool average) {
  TrainConfig c;
  c.loss = parse_loss(loss);
  c.l2 = l2;
  c.epochs_max = epochs;
  c.eta0 = eta0;
  c.seed = seed;
  c.average = average;
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_flipbound, m) {
  m.doc() = "Label-flip robustness bounds for linear classifiers";

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  static py::exception<TargetUnreachable> unreachable(m, "TargetUnreachable", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      py::set_error(input_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    } catch (const TargetUnreachable& e) {
      py::set_error(unreachable, e.what());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("X"), py::arg("y"))
      .def_property_readonly("X", &features_of)
      .def_property_readonly("y", &labels_of)
      .def_property_readonly("dim", &Dataset::dim)
      .def("__len__", &Dataset::size)
      .def("flipped", [](const Dataset& d, const std::vector<std::size_t>& idx) { return d.flipped(idx); });

  m.def("load_csv", [](const std::filesystem::path& p) { return load_csv(p); }, py::arg("path"));
  m.def("save_csv", [](const Dataset& d, const std::filesystem::path& p) { save_csv(d, p); },
        py::arg("data"), py::arg("path"));

  py::class_<LinearClassifier>(m, "LinearClassifier")
      .def(py::init([](std::vector<double> w, double b) { return LinearClassifier{std::move(w), b}; }),
           py::arg("w"), py::arg("b") = 0.0)
      .def_readonly("w", &LinearClassifier::w)
      .def_readonly("b", &LinearClassifier::b)
      .def("score", [](const LinearClassifier& c, const std::vector<double>& x) { return c.score(x); })
      .def("predict", [](const LinearClassifier& c, const std::vector<double>& x) { return c.predict(x); });

  py::class_<ExactResult>(m, "ExactResult")
      .def_readonly("robustness", &ExactResult::robustness)
      .def_readonly("flip_set", &ExactResult::flip_set)
      .def_readonly("witness", &ExactResult::witness)
      .def_readonly("node_count", &ExactResult::node_count)
      .def_readonly("best_bound", &ExactResult::best_bound)
      .def_property_readonly("proven", [](const ExactResult& r) { return r.status == SolveStatus::Proven; });

  m.def(
      "exact_robustness",
      [](const Dataset& d, const std::vector<double>& tx, int ty, bool bias, std::size_t node_budget,
         double big_m, double eps) {
        const auto inst = encode(d, make_target(tx, ty), big_m, eps, bias);
        py::gil_scoped_release release;
        return solve_bnb(inst, milp_params(big_m, eps, node_budget));
      },
      py::arg("data"), py::arg("target_x"), py::arg("target_y"), py::arg("bias") = true,
      py::arg("node_budget") = 1'000'000, py::arg("big_m") = 1000.0, py::arg("eps") = 1e-10);
  m.def(
      "brute_force_robustness",
      [](const Dataset& d, const std::vector<double>& tx, int ty, bool bias) {
        SeparabilityParams p;
        p.bias = bias;
        return brute_force_robustness(d, make_target(tx, ty), p);
      },
      py::arg("data"), py::arg("target_x"), py::arg("target_y"), py::arg("bias") = true);
  m.def(
      "verify_certificate",
      [](const Dataset& d, const std::vector<double>& tx, int ty, const std::vector<std::size_t>& flips,
         const LinearClassifier& c) { return verify_certificate(d, make_target(tx, ty), flips, c); },
      py::arg("data"), py::arg("target_x"), py::arg("target_y"), py::arg("flip_set"), py::arg("witness"));

  py::class_<BlockResult>(m, "BlockResult")
      .def_readonly("id", &BlockResult::id)
      .def_readonly("size", &BlockResult::size)
      .def_readonly("robustness", &BlockResult::robustness)
      .def_readonly("node_count", &BlockResult::node_count)
      .def_property_readonly("status", [](const BlockResult& b) { return std::string(to_string(b.status)); });
  py::class_<LowerBoundReport>(m, "LowerBoundReport")
      .def_readonly("lower", &LowerBoundReport::lower)
      .def_readonly("k", &LowerBoundReport::k)
      .def_readonly("blocks", &LowerBoundReport::blocks);
  m.def(
      "lower_bound",
      [](const Dataset& d, const std::vector<double>& tx, int ty, std::optional<std::size_t> k,
         std::uint64_t seed, std::size_t node_budget, std::size_t threads) {
        const auto plan = partition(d.size(), k ? *k : default_k(d.size(), d.dim()), seed);
        py::gil_scoped_release release;
        return lower_bound(d, make_target(tx, ty), plan, milp_params(1000.0, 1e-10, node_budget), threads);
      },
      py::arg("data"), py::arg("target_x"), py::arg("target_y"), py::arg("k") = py::none(),
      py::arg("seed") = 0, py::arg("node_budget") = 1'000'000, py::arg("threads") = 1);

  py::class_<UpperBoundReport>(m, "UpperBoundReport")
      .def_readonly("upper", &UpperBoundReport::upper)
      .def_readonly("certified", &UpperBoundReport::certified)
      .def_readonly("flip_set", &UpperBoundReport::flip_set)
      .def_readonly("witness", &UpperBoundReport::witness)
      .def_readonly("warning", &UpperBoundReport::warning);
  m.def(
      "upper_bound",
      [](const Dataset& d, const std::vector<double>& tx, int ty, const std::string& loss,
         std::size_t trials, std::uint64_t seed, double l2, std::size_t epochs) {
        UpperParams p;
        p.train = train_config(loss, l2, epochs, std::nullopt, seed, false);
        p.n_trials = trials;
        py::gil_scoped_release release;
        return upper_bound(d, make_target(tx, ty), p);
      },
      py::arg("data"), py::arg("target_x"), py::arg("target_y"), py::arg("loss") = "hinge",
      py::arg("trials") = 10, py::arg("seed") = 0, py::arg("l2") = 1e-4, py::arg("epochs") = 1000);

  py::class_<BoundsReport>(m, "BoundsReport")
      .def_readonly("lower", &BoundsReport::lower)
      .def_readonly("upper", &BoundsReport::upper);
  m.def(
      "bounds",
      [](const Dataset& d, const std::vector<double>& tx, int ty, std::optional<std::size_t> k,
         const std::string& loss, std::uint64_t seed, std::size_t node_budget, std::size_t threads) {
        BoundParams p;
        p.milp.node_budget = node_budget;
        p.k = k;
        p.upper.train.loss = parse_loss(loss);
        p.seed = seed;
        p.threads = threads;
        py::gil_scoped_release release;
        return compute_bounds(d, make_target(tx, ty), p);
      },
      py::arg("data"), py::arg("target_x"), py::arg("target_y"), py::arg("k") = py::none(),
      py::arg("loss") = "hinge", py::arg("seed") = 0, py::arg("node_budget") = 1'000'000,
      py::arg("threads") = 1);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("classifier", &TrainResult::classifier)
      .def_readonly("epochs", &TrainResult::epochs)
      .def_readonly("objective", &TrainResult::objective);
  m.def(
      "train",
      [](const Dataset& d, const std::string& loss, double l2, std::size_t epochs,
         std::optional<double> eta0, std::uint64_t seed, bool average) {
        return train(d, train_config(loss, l2, epochs, eta0, seed, average));
      },
      py::arg("data"), py::arg("loss") = "hinge", py::arg("l2") = 1e-4, py::arg("epochs") = 1000,
      py::arg("eta0") = py::none(), py::arg("seed") = 0, py::arg("average") = false);
  m.def(
      "objective",
      [](const LinearClassifier& c, const Dataset& d, const std::string& loss, double l2) {
        return objective(c, d, parse_loss(loss), l2);
      },
      py::arg("classifier"), py::arg("data"), py::arg("loss") = "hinge", py::arg("l2") = 1e-4);

  py::class_<SanitizeResult>(m, "SanitizeResult")
      .def_readonly("data", &SanitizeResult::data)
      .def_readonly("changed", &SanitizeResult::changed)
      .def_readonly("fixed_point", &SanitizeResult::fixed_point);
  m.def(
      "sanitize",
      [](const Dataset& d, std::size_t k_neighbors, bool sequential) {
        return sanitize(d, SanitizeConfig{k_neighbors, sequential, 1});
      },
      py::arg("data"), py::arg("k_neighbors") = 15, py::arg("sequential") = false);

  py::class_<Graph>(m, "Graph")
      .def(py::init<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>(), py::arg("n"),
           py::arg("edges"))
      .def_property_readonly("n", &Graph::n)
      .def_property_readonly("edges", &Graph::edges)
      .def_static("complete", &Graph::complete)
      .def_static("path", &Graph::path)
      .def_static("star", &Graph::star)
      .def_static("erdos_renyi", &Graph::erdos_renyi, py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def(
      "reduce",
      [](const Graph& g) {
        auto r = reduce(g);
        return py::make_tuple(r.data, r.target.x, r.target.y);
      },
      py::arg("graph"), "Returns (data, target_x, target_y).");
  m.def("min_vertex_cover", [](const Graph& g) { return min_vertex_cover(g).size; }, py::arg("graph"));

  m.def(
      "synthetic_separable",
      [](std::size_t n, std::size_t d, std::uint64_t seed, double gap) {
        return synthetic_separable(n, d, seed, gap);
      },
      py::arg("m"), py::arg("d"), py::arg("seed"), py::arg("gap") = 0.1);
  m.def(
      "derive_seed",
      [](std::uint64_t master, const std::string& tag, std::uint64_t index) {
        return derive_seed(master, tag, index);
      },
      py::arg("master"), py::arg("tag"), py::arg("index") = 0);
}
