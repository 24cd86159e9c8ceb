#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tvdist/coupling.hpp"
#include "tvdist/estimator.hpp"
#include "tvdist/inference.hpp"
#include "tvdist/model.hpp"
#include "tvdist/oracle.hpp"
#include "tvdist/treedecomp.hpp"

namespace py = pybind11;
using namespace tvdist;

namespace {

Structure structure_from_string(const std::string& s) {
  if (s == "path") return Structure::Path;
  if (s == "tree") return Structure::Tree;
  if (s == "random-dag") return Structure::RandomDag;
  throw InputError("unknown structure: " + s);
}

QuerySets sets_from_dict(const BayesNet& net,
                         const std::map<int, std::vector<int>>& sets) {
  QuerySets q = QuerySets::full(net.dag.n, net.alphabet);
  for (const auto& [var, symbols] : sets) {
    if (var < 0 || var >= net.dag.n) throw InputError("variable out of range");
    std::vector<bool> allow(net.alphabet, false);
    for (int s : symbols) {
      if (s < 0 || s >= net.alphabet) throw InputError("symbol out of range");
      allow[s] = true;
    }
    q.allow[var] = allow;
  }
  return q;
}

py::dict report_to_dict(const EstimateReport& r) {
  py::dict d;
  d["estimate"] = r.estimate;
  d["m"] = r.m;
  d["z"] = r.z;
  d["alpha_hat"] = r.alpha_hat;
  d["queries"] = r.queries;
  d["seed"] = r.seed;
  d["elapsed_ms"] = r.elapsed_ms;
  d["width"] = r.width;
  if (!r.phase.empty()) d["phase"] = r.phase;
  if (!r.estimate_exact.empty()) d["estimate_exact"] = r.estimate_exact;
  return d;
}

EstimateParams make_params(double eps, double delta, std::uint64_t seed,
                           std::optional<long long> samples, int threads,
                           bool exact_arith) {
  EstimateParams p;
  p.eps = eps;
  p.delta = delta;
  p.seed = seed;
  p.m_override = samples;
  p.threads = threads;
  p.exact_arith = exact_arith;
  return p;
}

}  // namespace

PYBIND11_MODULE(_tvdist, m) {
  m.doc() = "Total variation distance estimation between Bayes nets";

  py::register_exception<InputError>(m, "InputError");
  py::register_exception<BudgetError>(m, "BudgetError");

  py::class_<BayesNet>(m, "BayesNet")
      .def_property_readonly("n", [](const BayesNet& b) { return b.dag.n; })
      .def_property_readonly("alphabet",
                             [](const BayesNet& b) { return b.alphabet; })
      .def_property_readonly(
          "parents", [](const BayesNet& b) { return b.dag.parents; })
      .def_property_readonly(
          "max_indegree", [](const BayesNet& b) { return b.dag.max_indegree(); })
      .def("mass", [](const BayesNet& b, const std::vector<int>& x) {
        return b.mass(x);
      })
      .def("conditional",
           [](const BayesNet& b, int i, int symbol, const std::vector<int>& pa) {
             return b.conditional(i, symbol, pa);
           });

  m.def("parse_net", &parse_net, py::arg("text"));
  m.def("serialize_net", &serialize_net, py::arg("net"),
        py::arg("base_alphabet") = 0);

  m.def("validate", [](const BayesNet& net) {
    ValidationReport r = validate(net);
    py::dict d;
    d["ok"] = r.ok;
    d["violations"] = r.violations;
    return d;
  });

  m.def(
      "gen_random_net",
      [](int n, int alphabet, const std::string& structure, int max_indegree,
         std::uint64_t seed) {
        return gen_random_net(n, alphabet, structure_from_string(structure),
                              max_indegree, seed);
      },
      py::arg("n"), py::arg("alphabet"), py::arg("structure"),
      py::arg("max_indegree") = 2, py::arg("seed") = 0);

  m.def("decompose_width", [](const BayesNet& net) {
    return decompose(moralize(net)).width;
  });

  m.def(
      "infer",
      [](const BayesNet& net, const std::map<int, std::vector<int>>& sets) {
        TreeDecomposition td = decompose(moralize(net));
        return infer<double>(net, sets_from_dict(net, sets), td);
      },
      py::arg("net"), py::arg("sets"),
      "Pr[X_i in S_i for all i]; unlisted variables are unconstrained.");

  m.def(
      "exact_tv",
      [](const BayesNet& p, const BayesNet& q, long long budget) {
        Rational r = oracle::exact_tv(p, q, budget);
        return py::make_tuple(to_string(r), to_double(r));
      },
      py::arg("p"), py::arg("q"), py::arg("budget") = oracle::kDefaultBudget,
      "Exact d_TV by enumeration; returns (fraction string, float).");

  m.def(
      "estimate_tv",
      [](const BayesNet& p, const BayesNet& q, double eps, double delta,
         std::uint64_t seed, std::optional<long long> samples, int threads,
         bool exact_arith) {
        return report_to_dict(estimate_tv(
            p, q, make_params(eps, delta, seed, samples, threads, exact_arith)));
      },
      py::arg("p"), py::arg("q"), py::arg("eps") = 0.1, py::arg("delta") = 0.1,
      py::arg("seed") = 0, py::arg("samples") = std::nullopt,
      py::arg("threads") = 1, py::arg("exact_arith") = false);

  m.def(
      "estimate_tv_uniform",
      [](const BayesNet& p, double eps, double delta, std::uint64_t seed,
         std::optional<long long> samples) {
        return report_to_dict(estimate_tv_uniform(
            p, make_params(eps, delta, seed, samples, 1, false)));
      },
      py::arg("p"), py::arg("eps") = 0.1, py::arg("delta") = 0.1,
      py::arg("seed") = 0, py::arg("samples") = std::nullopt);

  m.def("sample_count", &sample_count, py::arg("n"), py::arg("eps"),
        py::arg("delta"));
}
