#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rheoflow/dataset.hpp"
#include "rheoflow/experiments.hpp"
#include "rheoflow/icnn.hpp"
#include "rheoflow/rheology.hpp"
#include "rheoflow/stokes.hpp"
#include "rheoflow/verifier.hpp"

namespace py = pybind11;
using namespace rheoflow;

namespace {

ViscosityModel make_viscosity(const py::object& spec) {
  if (py::isinstance<CarreauParams>(spec)) return ViscosityModel::carreau(spec.cast<CarreauParams>());
  if (py::isinstance<PowerLawParams>(spec))
    return ViscosityModel::power_law(spec.cast<PowerLawParams>());
  if (py::isinstance<IcnnModel>(spec)) return ViscosityModel::icnn(spec.cast<IcnnModel>());
  throw py::type_error("expected CarreauParams, PowerLawParams, or IcnnModel");
}

py::dict cert_dict(const AssumptionCertificate& cert) {
  py::dict d;
  d["C"] = cert.C;
  d["alpha"] = cert.alpha;
  d["r"] = cert.r;
  d["M"] = cert.M;
  d["satisfied"] = cert.satisfied;
  d["objective"] = cert.objective;
  d["worst_residuals"] =
      py::make_tuple(cert.worst_residuals.f1, cert.worst_residuals.f2, cert.worst_residuals.f3);
  return d;
}

}  // namespace

PYBIND11_MODULE(_rheoflow, m) {
  m.doc() = "structure-preserving viscosity models and a non-Newtonian Stokes solver";

  py::class_<CarreauParams>(m, "CarreauParams")
      .def(py::init([](double k0, double k_inf, double lambda, double n) {
             CarreauParams p{k0, k_inf, lambda, n};
             p.validate();
             return p;
           }),
           py::arg("k0"), py::arg("k_inf"), py::arg("lambda_"), py::arg("n"))
      .def_readonly("k0", &CarreauParams::k0)
      .def_readonly("k_inf", &CarreauParams::k_inf)
      .def_readonly("lambda_", &CarreauParams::lambda)
      .def_readonly("n", &CarreauParams::n);

  py::class_<PowerLawParams>(m, "PowerLawParams")
      .def(py::init([](double k0, double n) {
             PowerLawParams p{k0, n};
             p.validate();
             return p;
           }),
           py::arg("k0"), py::arg("n"))
      .def_readonly("k0", &PowerLawParams::k0)
      .def_readonly("n", &PowerLawParams::n);

  py::class_<IcnnModel>(m, "IcnnModel")
      .def_readonly("architecture", &IcnnModel::architecture)
      .def_readonly("sign", &IcnnModel::sign)
      .def("__call__", [](const IcnnModel& model, double t) { return icnn_forward1(model, t); })
      .def("grad", [](const IcnnModel& model, double t) { return icnn_grad1(model, t); });

  py::class_<RheologyDataset>(m, "RheologyDataset")
      .def(py::init([](std::string name, std::vector<std::pair<double, double>> samples) {
             RheologyDataset ds{std::move(name), std::move(samples)};
             ds.validate();
             return ds;
           }),
           py::arg("name"), py::arg("samples"))
      .def_readonly("name", &RheologyDataset::name)
      .def_readonly("samples", &RheologyDataset::samples)
      .def("max_shear_rate", &RheologyDataset::max_shear_rate);

  m.def("load_dataset_csv", &load_dataset_csv, py::arg("path"));
  m.def("save_dataset_csv", &save_dataset_csv, py::arg("dataset"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));

  m.def(
      "carreau_eval",
      [](double t, const CarreauParams& p) { return carreau_eval(t, p); },
      py::arg("t"), py::arg("params"));
  m.def(
      "viscosity_eval",
      [](const py::object& spec, double t) { return viscosity_eval(make_viscosity(spec), t); },
      py::arg("model"), py::arg("t"));
  m.def(
      "viscosity_deriv",
      [](const py::object& spec, double t) { return viscosity_deriv(make_viscosity(spec), t); },
      py::arg("model"), py::arg("t"));

  m.def(
      "fit",
      [](const RheologyDataset& ds, std::vector<int> architecture, int epochs,
         std::uint64_t seed) {
        TrainConfig tc;
        tc.epochs = epochs;
        tc.seed = seed;
        const SelectResult sel = select_convex_concave(ds, architecture, tc);
        py::dict d;
        d["model"] = sel.model;
        d["loss_convex"] = sel.loss_plus;
        d["loss_concave"] = sel.loss_minus;
        return d;
      },
      py::arg("dataset"), py::arg("architecture") = std::vector<int>{1, 120, 56, 1},
      py::arg("epochs") = 20000, py::arg("seed") = 0);

  m.def(
      "verify",
      [](const py::object& spec, int n_samples, double t_max, int generations,
         std::uint64_t seed) {
        VerifierConfig cfg;
        cfg.n_samples = n_samples;
        cfg.t_max = t_max;
        cfg.de_generations = generations;
        cfg.seed = seed;
        return cert_dict(verify(make_viscosity(spec), cfg));
      },
      py::arg("model"), py::arg("n_samples") = 100, py::arg("t_max") = 70.0,
      py::arg("generations") = 1000, py::arg("seed") = 0);

  m.def(
      "solve",
      [](const py::object& spec, int mesh, int degree, double r) {
        const ViscosityModel model = make_viscosity(spec);
        const ManufacturedCase mc = default_manufactured_case();
        const TaylorHood th = build_taylor_hood(mesh, degree);
        Eigen::VectorXd sol = Eigen::VectorXd::Zero(th.n_dofs());
        NewtonConfig cfg;
        cfg.continuation = true;
        const NewtonResult result = newton_solve(th, model, model, mc, cfg, sol);
        const ErrorReport err = compute_errors(th, sol, mc, r);
        py::dict d;
        d["err_u"] = err.err_u;
        d["err_p"] = err.err_p;
        d["iterations"] = result.log.empty() ? 0 : result.log.back().iter;
        d["used_continuation"] = result.used_continuation;
        return d;
      },
      py::arg("model"), py::arg("mesh") = 16, py::arg("degree") = 2, py::arg("r") = 2.0);

  m.def(
      "convergence_study",
      [](const py::object& spec, int degree, std::vector<int> meshes, double r) {
        const ViscosityModel model = make_viscosity(spec);
        NewtonConfig cfg;
        cfg.continuation = true;
        const RateTable table = convergence_study(model, model, default_manufactured_case(),
                                                  degree, meshes, r, cfg);
        py::list rows;
        for (const auto& row : table.rows) {
          py::dict d;
          d["m"] = row.m;
          d["h"] = row.h;
          d["err_u"] = row.err_u;
          d["err_p"] = row.err_p;
          d["rate_u"] = row.rate_u;
          d["rate_p"] = row.rate_p;
          rows.append(d);
        }
        py::dict out;
        out["rows"] = rows;
        out["slope_u"] = table.slope_u;
        out["slope_p"] = table.slope_p;
        return out;
      },
      py::arg("model"), py::arg("degree") = 2, py::arg("meshes") = std::vector<int>{8, 16, 32},
      py::arg("r") = 2.0);

  m.def("sample_carreau_dataset", &sample_carreau_dataset, py::arg("params"),
        py::arg("n_samples") = 100, py::arg("t_max") = 70.0, py::arg("seed") = 0);
  m.def("synthetic_xanthan_dataset", &synthetic_xanthan_dataset, py::arg("name"),
        py::arg("seed") = 0);

  py::register_exception<CsvParseError>(m, "CsvParseError", PyExc_ValueError);
  py::register_exception<ModelParseError>(m, "ModelParseError", PyExc_ValueError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_RuntimeError);
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);
}
