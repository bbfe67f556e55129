#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "frailtycr/closedform.hpp"
#include "frailtycr/fit.hpp"
#include "frailtycr/identifiability.hpp"
#include "frailtycr/io_json.hpp"
#include "frailtycr/oracle.hpp"
#include "frailtycr/simulate.hpp"
#include "frailtycr/version.hpp"

namespace py = pybind11;
using namespace frailtycr;

namespace {

GridSpec make_grid(const std::vector<double>& t1, const std::vector<double>& t2) {
  GridSpec g;
  g.t1 = t1;
  g.t2 = t2;
  return g;
}

py::dict estimate_to_dict(const OracleEstimate& est) {
  py::dict d;
  d["value"] = est.value;
  d["std_error"] = est.std_error;
  d["achieved_tol"] = est.achieved_tol;
  d["work"] = est.work;
  return d;
}

std::string fit_result_to_json(const FitResult& fit) {
  nlohmann::json j;
  j["family"] = fit.model.frailty.law_name();
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["log_likelihood"] = fit.log_lik;
  j["model"] = model_to_json(fit.model);
  nlohmann::json params = nlohmann::json::object();
  for (std::size_t i = 0; i < fit.parameter_names.size(); ++i)
    params[fit.parameter_names[i]] = fit.parameters[i];
  j["parameters"] = params;
  if (!fit.std_errors.empty()) {
    nlohmann::json ses = nlohmann::json::object();
    for (std::size_t i = 0; i < fit.parameter_names.size(); ++i)
      ses[fit.parameter_names[i]] = fit.std_errors[i];
    j["std_errors"] = ses;
  }
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "bivariate competing-risks Gamma frailty models";
  m.attr("__version__") = kVersion;

  py::class_<ModelSpec>(m, "Model")
      .def_static("from_json", &model_from_string, py::arg("text"),
                  "Parse a model from its JSON description.")
      .def("to_json", &model_to_compact_string)
      .def("num_causes", &ModelSpec::num_causes, py::arg("k"))
      .def("__repr__", [](const ModelSpec& spec) {
        return "<frailtycr.Model " + spec.frailty.law_name() + ">";
      });

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("records",
                             [](const Dataset& ds) {
                               py::list out;
                               for (const auto& r : ds.records)
                                 out.append(py::make_tuple(r.t1, r.j1, r.t2, r.j2));
                               return out;
                             })
      .def_property_readonly("seed", [](const Dataset& ds) { return ds.meta.seed; })
      .def_property_readonly("model_json", [](const Dataset& ds) { return ds.meta.model_json; })
      .def("__len__", [](const Dataset& ds) { return ds.records.size(); })
      .def("write", [](const Dataset& ds, const std::string& path) { write_dataset(ds, path); },
           py::arg("path"));

  m.def("read_dataset", [](const std::string& path) { return read_dataset(path); },
        py::arg("path"));

  m.def("simulate", &simulate_pairs, py::arg("model"), py::arg("n"), py::arg("seed"),
        py::arg("threads") = 0,
        "Draw a dataset of (t1, j1, t2, j2) records from the model.");

  m.def("sample_frailty",
        [](const ModelSpec& model, long n, std::uint64_t seed) {
          const int L1 = model.num_causes(1), L2 = model.num_causes(2);
          py::list out;
          for (long i = 0; i < n; ++i) {
            RngStream rng = RngStream::derived(seed, static_cast<std::uint64_t>(i));
            const FrailtyDraw d = sample_frailty(model.frailty, L1, L2, rng);
            out.append(py::make_tuple(d.eps1, d.eps2));
          }
          return out;
        },
        py::arg("model"), py::arg("n"), py::arg("seed"));

  m.def("marginal_subdist",
        [](const ModelSpec& model, int k, int j, double t) {
          return marginal_subdist(model, k, j, t);
        },
        py::arg("model"), py::arg("k"), py::arg("j"), py::arg("t"),
        "P[T_k <= t, J_k = j]");
  m.def("joint_subdist",
        [](const ModelSpec& model, double t1, double t2, int j1, int j2) {
          return joint_subdist(model, {t1, t2, j1, j2});
        },
        py::arg("model"), py::arg("t1"), py::arg("t2"), py::arg("j1"), py::arg("j2"),
        "P[T_1 <= t1, T_2 <= t2, J_1 = j1, J_2 = j2]");
  m.def("joint_subdensity",
        [](const ModelSpec& model, double t1, double t2, int j1, int j2) {
          return joint_subdensity(model, {t1, t2, j1, j2});
        },
        py::arg("model"), py::arg("t1"), py::arg("t2"), py::arg("j1"), py::arg("j2"));
  m.def("joint_survival",
        [](const ModelSpec& model, double t1, double t2) {
          return joint_survival(model, t1, t2);
        },
        py::arg("model"), py::arg("t1"), py::arg("t2"));
  m.def("gamma_laplace", &gamma_laplace, py::arg("H"), py::arg("sigma_sq"));

  m.def("oracle_quad_dimension", &oracle_quad_dimension, py::arg("model"));
  m.def("quad_joint_subdist",
        [](const ModelSpec& model, double t1, double t2, int j1, int j2, double tol) {
          return estimate_to_dict(quad_joint_subdist(model, {t1, t2, j1, j2}, tol));
        },
        py::arg("model"), py::arg("t1"), py::arg("t2"), py::arg("j1"), py::arg("j2"),
        py::arg("tol") = 1e-8);
  m.def("mc_joint_subdist",
        [](const ModelSpec& model, double t1, double t2, int j1, int j2, long n,
           std::uint64_t seed, int threads) {
          return estimate_to_dict(mc_joint_subdist(model, {t1, t2, j1, j2}, n, seed, threads));
        },
        py::arg("model"), py::arg("t1"), py::arg("t2"), py::arg("j1"), py::arg("j2"),
        py::arg("n"), py::arg("seed"), py::arg("threads") = 0);
  m.def("mc_subdensity",
        [](const ModelSpec& model, double t1, double t2, int j1, int j2, long n,
           std::uint64_t seed, int threads) {
          return estimate_to_dict(mc_subdensity(model, {t1, t2, j1, j2}, n, seed, threads));
        },
        py::arg("model"), py::arg("t1"), py::arg("t2"), py::arg("j1"), py::arg("j2"),
        py::arg("n"), py::arg("seed"), py::arg("threads") = 0);

  m.def("log_likelihood",
        [](const Dataset& ds, const ModelSpec& model, int threads) {
          return log_likelihood(ds, model, threads);
        },
        py::arg("dataset"), py::arg("model"), py::arg("threads") = 0);

  m.def("fit_mle_json",
        [](const Dataset& ds, const ModelSpec& init, bool freeze_hazards, bool std_errors,
           int max_iterations, int threads) {
          FitOptions options;
          options.freeze_hazards = freeze_hazards;
          options.compute_std_errors = std_errors;
          options.max_iterations = max_iterations;
          options.threads = threads;
          return fit_result_to_json(fit_mle(ds, init, options));
        },
        py::arg("dataset"), py::arg("init"), py::arg("freeze_hazards") = false,
        py::arg("std_errors") = false, py::arg("max_iterations") = 2000,
        py::arg("threads") = 0);
  m.def("auto_init",
        [](const Dataset& ds, const ModelSpec& structure, int threads) {
          return auto_init(ds, structure, threads);
        },
        py::arg("dataset"), py::arg("structure"), py::arg("threads") = 0);

  m.def("default_grid",
        [](const ModelSpec& model, int count, double hmin, double hmax) {
          const GridSpec g = default_grid(model, count, hmin, hmax);
          return py::make_tuple(g.t1, g.t2);
        },
        py::arg("model"), py::arg("count") = 8, py::arg("hmin") = 0.1, py::arg("hmax") = 5.0);
  m.def("verify_general_nonidentifiability_json",
        [](const ModelSpec& base, double c1, double c2, const std::vector<double>& t1,
           const std::vector<double>& t2, bool broken_pairing, long mc_n, std::uint64_t seed,
           int threads) {
          return report_to_json(verify_general_nonidentifiability(
                                    base, c1, c2, make_grid(t1, t2), broken_pairing, mc_n, seed,
                                    threads))
              .dump();
        },
        py::arg("base"), py::arg("c1"), py::arg("c2"), py::arg("t1"), py::arg("t2"),
        py::arg("broken_pairing") = false, py::arg("mc_n") = 1000000, py::arg("seed") = 1,
        py::arg("threads") = 0);
  m.def("verify_dirichlet_invariance_json",
        [](const ModelSpec& model, double c1, double c2, const std::vector<double>& t1,
           const std::vector<double>& t2, double sigma_perturb) {
          return report_to_json(
                     verify_dirichlet_invariance(model, c1, c2, make_grid(t1, t2), sigma_perturb))
              .dump();
        },
        py::arg("model"), py::arg("c1"), py::arg("c2"), py::arg("t1"), py::arg("t2"),
        py::arg("sigma_perturb") = 0.0);
  m.def("distinguishability_scan_json",
        [](const ModelSpec& a, const ModelSpec& b, const std::vector<double>& t1,
           const std::vector<double>& t2, double threshold) {
          return report_to_json(distinguishability_scan(a, b, make_grid(t1, t2), threshold))
              .dump();
        },
        py::arg("model_a"), py::arg("model_b"), py::arg("t1"), py::arg("t2"),
        py::arg("threshold") = 1e-4);
}
