#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "krflow/ansatz.hpp"
#include "krflow/errors.hpp"
#include "krflow/experiment.hpp"
#include "krflow/formal_expansion.hpp"
#include "krflow/flow_solver.hpp"
#include "krflow/model_metrics.hpp"

namespace py = pybind11;
using namespace krf;

namespace {

py::dict report_dict(const RunReport& r) {
  py::list verdicts;
  for (const auto& v : r.verdicts) {
    py::dict d;
    d["name"] = v.name;
    d["pass"] = v.pass;
    d["measured"] = v.measured;
    d["expected"] = v.expected;
    d["tolerance"] = v.tolerance;
    d["claim"] = v.claim;
    verdicts.append(d);
  }
  py::dict artifacts;
  for (const auto& a : r.artifacts) artifacts[py::str(a.name)] = a.content;
  py::dict out;
  out["scenario"] = r.scenario;
  out["all_pass"] = r.all_pass();
  out["verdicts"] = verdicts;
  out["artifacts"] = artifacts;
  return out;
}

Task task_from_string(const std::string& s) {
  for (Task t : {Task::Run, Task::Soliton, Task::Flow, Task::Blowdown, Task::Decay})
    if (s == to_string(t)) return t;
  fail(ErrorKind::ConfigInvalid, "unknown task '" + s + "'");
}

ConfigLayers layers_of(const std::optional<std::string>& preset, const std::optional<std::string>& config,
                       const std::map<std::string, std::string>& flags) {
  ConfigLayers l;
  l.preset = preset;
  l.file_text = config;
  for (const auto& [k, v] : flags) l.flags.emplace_back(k, v);
  return l;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radial Kaehler-Ricci flow on the Calabi ansatz";

  // the module attribute keeps the type alive
  static PyObject* error_type = py::exception<Error>(m, "KrflowError").ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type)(e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<BaseGeometry>(m, "BaseGeometry")
      .def(py::init([](int n, double lambda, int mu, int orbifold_k) {
             BaseGeometry b{n, lambda, mu, orbifold_k};
             b.validate();
             return b;
           }),
           py::arg("n") = 2, py::arg("lambda_") = 0.0, py::arg("mu") = 1, py::arg("orbifold_k") = 1)
      .def_readonly("n", &BaseGeometry::n)
      .def_readonly("lambda_", &BaseGeometry::lambda)
      .def_readonly("mu", &BaseGeometry::mu)
      .def_readonly("orbifold_k", &BaseGeometry::orbifold_k)
      .def("__repr__", [](const BaseGeometry& b) {
        return "BaseGeometry(n=" + std::to_string(b.n) + ", lambda_=" + py::repr(py::float_(b.lambda)).cast<std::string>() +
               ", mu=" + std::to_string(b.mu) + ")";
      });

  py::class_<RadialProfile>(m, "RadialProfile")
      .def(py::init<std::vector<double>, std::vector<double>, std::vector<double>>(), py::arg("rho"), py::arg("phi"),
           py::arg("psi"))
      .def_property_readonly("rho", &RadialProfile::rho)
      .def_property_readonly("phi", &RadialProfile::phi)
      .def_property_readonly("psi", &RadialProfile::psi)
      .def_property_readonly("spacing", &RadialProfile::spacing)
      .def("min_phi", &RadialProfile::min_phi)
      .def("min_psi", &RadialProfile::min_psi)
      .def("__len__", &RadialProfile::size);

  m.def("closedness_defect", &closedness_defect, py::arg("profile"), py::arg("mu"));

  m.def(
      "make_model",
      [](const std::string& kind, const BaseGeometry& base, const std::vector<double>& grid, std::optional<double> c,
         std::optional<double> N, std::optional<double> k_log, std::optional<double> offset) {
        RegimeSpec s;
        s.kind = regime_from_string(kind);
        s.c = c;
        s.N = N;
        s.k_log = k_log;
        s.offset = offset;
        return make_model(s, base, grid);
      },
      py::arg("kind"), py::arg("base"), py::arg("grid"), py::kw_only(), py::arg("c") = py::none(),
      py::arg("N") = py::none(), py::arg("k_log") = py::none(), py::arg("offset") = py::none());

  m.def("scalar_curvature", &scalar_curvature, py::arg("profile"), py::arg("base"));
  m.def("curvature_norm", &curvature_norm_samples, py::arg("profile"), py::arg("base"));
  m.def(
      "ricci_coefficients",
      [](const RadialProfile& p, const BaseGeometry& b) {
        const auto r = ricci_coefficients(p, b);
        return py::make_tuple(r.r_base, r.r_fiber);
      },
      py::arg("profile"), py::arg("base"));

  m.def(
      "evolve",
      [](const RadialProfile& init, const BaseGeometry& base, double horizon, const std::string& scheme, double dt,
         const std::string& bc_kind, std::vector<double> output_times) {
        FlowControls c;
        c.scheme = scheme_from_string(scheme);
        c.dt = dt;
        c.bc_kind = boundary_from_string(bc_kind);
        c.output_times = std::move(output_times);
        const auto traj = [&] {
          py::gil_scoped_release release;
          return evolve(init, base, horizon, c);
        }();
        return py::make_tuple(traj.times, traj.profiles);
      },
      py::arg("initial"), py::arg("base"), py::arg("horizon"), py::kw_only(),
      py::arg("scheme") = "ImplicitTrapezoid", py::arg("dt") = 0.0, py::arg("bc_kind") = "DriftingModel",
      py::arg("output_times") = std::vector<double>{});

  m.def(
      "soliton_coefficients",
      [](const std::string& n, const std::string& lambda, int order) {
        const auto e = soliton_expand({parse_rational(n), parse_rational(lambda)}, order);
        std::vector<std::string> out;
        for (int j = 1; j <= order; ++j) out.push_back(to_string(e.at(j)));
        return out;
      },
      py::arg("n"), py::arg("lambda_"), py::arg("order"),
      "a_1..a_order of the formal expanding soliton, as exact rational strings");

  m.def("presets", [] {
    py::list out;
    for (const auto& p : list_presets()) {
      py::dict d;
      d["name"] = p.name;
      d["description"] = p.description;
      d["claims"] = p.claims;
      out.append(d);
    }
    return out;
  });

  m.def(
      "resolve_config",
      [](std::optional<std::string> preset, std::optional<std::string> config,
         const std::map<std::string, std::string>& flags) {
        return config_to_json(resolve_config(layers_of(preset, config, flags)));
      },
      py::arg("preset") = py::none(), py::arg("config") = py::none(),
      py::arg("flags") = std::map<std::string, std::string>{}, "canonical JSON text of the resolved configuration");

  m.def(
      "run",
      [](std::optional<std::string> preset, std::optional<std::string> config,
         const std::map<std::string, std::string>& flags, const std::string& task, bool write) {
        const auto cfg = resolve_config(layers_of(preset, config, flags));
        const auto t = task_from_string(task);
        const auto report = [&] {
          py::gil_scoped_release release;
          return run_experiment(cfg, t);
        }();
        if (write) write_report(cfg, report, "{\"source\": \"python\"}\n");
        auto d = report_dict(report);
        d["output_dir"] = cfg.output_dir;
        return d;
      },
      py::arg("preset") = py::none(), py::arg("config") = py::none(),
      py::arg("flags") = std::map<std::string, std::string>{}, py::arg("task") = "run", py::arg("write") = false,
      "runs an experiment; write=True also writes the report files under output_dir");
}
