#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpsing/errors.hpp"
#include "gpsing/minimize.hpp"
#include "gpsing/problem.hpp"
#include "gpsing/profile.hpp"
#include "gpsing/report.hpp"
#include "gpsing/sweep.hpp"
#include "gpsing/version.hpp"

namespace py = pybind11;
using namespace gpsing;

PYBIND11_MODULE(_core, m) {
  m.doc() = "constrained minimizers of the singular Gross-Pitaevskii energy";
  m.attr("__version__") = kVersion;

  // translators run newest-first, so the base goes in before the derived
  py::register_exception<Error>(m, "GpsingError", PyExc_RuntimeError);
  py::register_exception<RegimeViolation>(m, "RegimeViolation", PyExc_ValueError);

  py::class_<ProblemParams>(m, "ProblemParams")
      .def_readonly("N", &ProblemParams::N)
      .def_readonly("p", &ProblemParams::p)
      .def_readonly("b", &ProblemParams::b)
      .def_readonly("M", &ProblemParams::M)
      .def("with_M", &ProblemParams::with_M)
      .def("__repr__", [](const ProblemParams& q) {
        return "ProblemParams(N=" + std::to_string(q.N) +
               ", p=" + std::to_string(q.p) + ", b=" + std::to_string(q.b) +
               ", M=" + std::to_string(q.M) + ")";
      });

  py::class_<DerivedConstants>(m, "DerivedConstants")
      .def_readonly("lambda0", &DerivedConstants::lambda0)
      .def_readonly("beta_energy", &DerivedConstants::beta_energy)
      .def_readonly("beta_length", &DerivedConstants::beta_length)
      .def_readonly("a_star", &DerivedConstants::a_star)
      .def_readonly("c_gn", &DerivedConstants::c_gn);

  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def_static("zero", &PotentialSpec::zero)
      .def_static("power", &PotentialSpec::power, py::arg("gamma"), py::arg("s"))
      .def_static("parse", &PotentialSpec::parse)
      .def("__call__", &PotentialSpec::operator())
      .def("__repr__", [](const PotentialSpec& v) { return v.str(); });

  m.def("validate_params", &validate_params, py::arg("N"), py::arg("p"),
        py::arg("b"), py::arg("M") = 1.0);
  m.def("derived_constants", &derived_constants);
  m.def("gn_constant", &gn_constant);
  m.def("tilde_I_closed", &tilde_I_closed);
  m.def("epsilon_of", &epsilon_of);
  m.def("tilde_alpha_of", &tilde_alpha_of);
  m.def("tilde_mu1_closed", &tilde_mu1_closed);
  m.def("tilde_scaling_identity", &tilde_scaling_identity);

  py::class_<RadialGrid, std::shared_ptr<RadialGrid>>(m, "RadialGrid")
      .def_readonly("N", &RadialGrid::N)
      .def_readonly("rmax", &RadialGrid::rmax)
      .def_readonly("grading", &RadialGrid::grading)
      .def_readonly("surface_const", &RadialGrid::surface_const)
      .def_readonly("r", &RadialGrid::r)
      .def_property_readonly("nodes", &RadialGrid::nodes);

  py::class_<RadialField>(m, "RadialField")
      .def_property_readonly(
          "grid",
          [](const RadialField& f) {
            return std::const_pointer_cast<RadialGrid>(f.grid);
          })
      .def_readonly("values", &RadialField::values)
      .def("__len__", &RadialField::size);

  m.def(
      "build_grid",
      [](int N, double rmax, std::size_t nodes, double grading) {
        return std::const_pointer_cast<RadialGrid>(
            build_grid(N, rmax, nodes, grading));
      },
      py::arg("N"), py::arg("rmax"), py::arg("nodes"), py::arg("grading") = 2.0);
  m.def("field_from_samples", [](const std::shared_ptr<RadialGrid>& g, std::vector<double> v) {
    return RadialField(g, std::move(v));
  });
  m.def("integrate", &integrate, py::arg("field"), py::arg("weight_shift") = 0.0);
  m.def("l2_norm_sq", &l2_norm_sq);
  m.def("h1_seminorm_sq", &h1_seminorm_sq);
  m.def("sup_distance", &sup_distance);
  m.def("rescale", &rescale);
  m.def("interp_eval", &interp_eval);

  py::class_<GroundStateW>(m, "GroundStateW")
      .def_readonly("profile", &GroundStateW::profile)
      .def_readonly("a_star", &GroundStateW::a_star)
      .def_readonly("w0", &GroundStateW::w0)
      .def_readonly("pohozaev_res", &GroundStateW::pohozaev_res)
      .def_readonly("decay", &GroundStateW::decay)
      .def_readonly("decay_quality", &GroundStateW::decay_quality)
      .def_readonly("method", &GroundStateW::method)
      .def("eval", &GroundStateW::eval);

  m.def(
      "solve_w_shooting",
      [](const ProblemParams& q, const std::shared_ptr<RadialGrid>& g) {
        return solve_w_shooting(q, g);
      },
      py::arg("params"), py::arg("grid"));
  m.def(
      "solve_w_flow",
      [](const ProblemParams& q, const std::shared_ptr<RadialGrid>& g) {
        return solve_w_flow(q, g);
      },
      py::arg("params"), py::arg("grid"));
  m.def("pohozaev_residual", &pohozaev_residual);
  m.def("interaction_integral", &interaction_integral);
  m.def("gn_ratio", &gn_ratio);

  py::class_<FlowConfig>(m, "FlowConfig")
      .def(py::init<>())
      .def_readwrite("dt", &FlowConfig::dt)
      .def_readwrite("max_iters", &FlowConfig::max_iters)
      .def_readwrite("tol_energy", &FlowConfig::tol_energy)
      .def_readwrite("tol_residual", &FlowConfig::tol_residual)
      .def_readwrite("gaussian_width", &FlowConfig::gaussian_width);

  py::class_<EnergyParts>(m, "EnergyParts")
      .def_readonly("kinetic", &EnergyParts::kinetic)
      .def_readonly("trap", &EnergyParts::trap)
      .def_readonly("interaction", &EnergyParts::interaction)
      .def_readonly("total", &EnergyParts::total);

  py::class_<MinimizerResult>(m, "MinimizerResult")
      .def_readonly("u", &MinimizerResult::u)
      .def_readonly("energy", &MinimizerResult::energy)
      .def_readonly("mu", &MinimizerResult::mu)
      .def_readonly("mu_rayleigh", &MinimizerResult::mu_rayleigh)
      .def_readonly("iters", &MinimizerResult::iters)
      .def_readonly("el_residual", &MinimizerResult::el_residual)
      .def_readonly("converged", &MinimizerResult::converged)
      .def_readonly("energy_history", &MinimizerResult::energy_history);

  m.def("evaluate_E", &evaluate_E);
  m.def(
      "gfdn_minimize",
      [](const ProblemParams& q, const PotentialSpec& pot,
         const std::shared_ptr<RadialGrid>& g, const FlowConfig& cfg,
         const GroundStateW* w) {
        return gfdn_minimize(q, pot, g, cfg, w);
      },
      py::arg("params"), py::arg("potential"), py::arg("grid"),
      py::arg("config") = FlowConfig{}, py::arg("w_hint") = nullptr);
  m.def("lagrange_multiplier", &lagrange_multiplier);
  m.def(
      "test_function_energy",
      [](const ProblemParams& q, const PotentialSpec& pot,
         const std::shared_ptr<RadialGrid>& g, double tau,
         const GroundStateW& w) {
        const TestFunctionEnergy t = test_function_energy(q, pot, g, tau, w);
        return py::make_tuple(t.energy, t.a_tau);
      },
      py::arg("params"), py::arg("potential"), py::arg("grid"), py::arg("tau"),
      py::arg("w"));

  py::class_<DecayFit>(m, "DecayFit")
      .def_readonly("rate", &DecayFit::rate)
      .def_readonly("window", &DecayFit::window)
      .def_readonly("theta", &DecayFit::theta)
      .def_readonly("quality", &DecayFit::quality);
  m.def("decay_fit", &decay_fit);

  py::class_<ScalingRow>(m, "ScalingRow")
      .def_readonly("M", &ScalingRow::M)
      .def_readonly("I_M", &ScalingRow::I_M)
      .def_readonly("ratio", &ScalingRow::ratio)
      .def_readonly("trap_mass", &ScalingRow::trap_mass)
      .def_readonly("eps", &ScalingRow::eps)
      .def_readonly("mu", &ScalingRow::mu)
      .def_readonly("mu_eps2", &ScalingRow::mu_eps2)
      .def_readonly("sup_dist", &ScalingRow::sup_dist)
      .def_readonly("h1_dist", &ScalingRow::h1_dist)
      .def_readonly("sing_mass", &ScalingRow::sing_mass)
      .def_readonly("decay_rate", &ScalingRow::decay_rate)
      .def_readonly("sandwich_ok", &ScalingRow::sandwich_ok)
      .def_readonly("converged", &ScalingRow::converged)
      .def_readonly("error", &ScalingRow::error);

  py::class_<ScalingReport>(m, "ScalingReport")
      .def_readonly("a_star", &ScalingReport::a_star)
      .def_readonly("lambda0", &ScalingReport::lambda0)
      .def_readonly("beta_energy", &ScalingReport::beta_energy)
      .def_readonly("beta_length", &ScalingReport::beta_length)
      .def_readonly("rows", &ScalingReport::rows)
      .def_readonly("notes", &ScalingReport::notes);

  m.def(
      "run_sweep",
      [](const ProblemParams& q, const PotentialSpec& pot,
         const std::vector<double>& M_list,
         const std::shared_ptr<RadialGrid>& g, const FlowConfig& cfg,
         const GroundStateW& w) {
        return run_sweep(q, pot, M_list, g, cfg, w);
      },
      py::arg("params"), py::arg("potential"), py::arg("M_list"),
      py::arg("grid"), py::arg("config"), py::arg("w"));
}
