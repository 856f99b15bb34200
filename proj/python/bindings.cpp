#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nems/circuit.hpp"
#include "nems/designer.hpp"
#include "nems/drivetools.hpp"
#include "nems/dynamics.hpp"
#include "nems/potential.hpp"
#include "nems/quantize.hpp"
#include "nems/report.hpp"
#include "nems/wao.hpp"

namespace py = pybind11;
using namespace nems;

PYBIND11_MODULE(_nems, m) {
  m.doc() = "Multi-loop SQUID nonlinearity design and verification";

  py::register_exception<parse_error>(m, "ParseError");
  py::register_exception<validation_error>(m, "ValidationError");

  py::class_<JosephsonBranch>(m, "JosephsonBranch")
      .def(py::init<>())
      .def(py::init([](double r, int n, double dc_bias, double ac_ratio) {
             return JosephsonBranch{r, n, dc_bias, ac_ratio, false};
           }),
           py::arg("r"), py::arg("n"), py::arg("dc_bias") = 0.0,
           py::arg("ac_ratio") = 0.0)
      .def_readwrite("r", &JosephsonBranch::r)
      .def_readwrite("n", &JosephsonBranch::n)
      .def_readwrite("dc_bias", &JosephsonBranch::dc_bias)
      .def_readwrite("ac_ratio", &JosephsonBranch::ac_ratio)
      .def_readwrite("periodic", &JosephsonBranch::periodic)
      .def("sign", &JosephsonBranch::sign)
      .def("truncated_bias", &JosephsonBranch::truncated_bias);

  py::class_<CircuitSpec>(m, "CircuitSpec")
      .def(py::init<>())
      .def_readwrite("inductor_EJL", &CircuitSpec::inductor_EJL)
      .def_readwrite("inductor_n", &CircuitSpec::inductor_n)
      .def_readwrite("charging_energy", &CircuitSpec::charging_energy)
      .def_readwrite("branches", &CircuitSpec::branches)
      .def_property_readonly("EL", &CircuitSpec::EL)
      .def("validate", &CircuitSpec::validate);

  m.def("preset_circuit", &preset_circuit, py::arg("name"));
  m.def("preset_names", &preset_names);
  m.def("load_circuit", &load_circuit, py::arg("path"));
  m.def("parse_circuit", &parse_circuit, py::arg("json_text"));
  m.def("serialize_circuit", &serialize_circuit, py::arg("circuit"));
  m.def("emf_residual", &emf_residual, py::arg("circuit"));

  py::class_<PotentialSeries>(m, "PotentialSeries")
      .def_readonly("phi_star", &PotentialSeries::phi_star)
      .def_readonly("c_static", &PotentialSeries::c_static)
      .def_readonly("c_driven", &PotentialSeries::c_driven)
      .def_readonly("order", &PotentialSeries::order)
      .def_readonly("well_depth", &PotentialSeries::well_depth);

  m.def("u_total", &u_total, py::arg("circuit"), py::arg("phi"),
        py::arg("flux_offsets"));
  m.def("u_static", &u_static, py::arg("circuit"), py::arg("phi"),
        py::arg("periodic") = false);
  m.def("u_branch_periodic", &u_branch_periodic, py::arg("r"), py::arg("n"),
        py::arg("phi_J"));
  m.def("find_minimum", &find_minimum, py::arg("circuit"));
  m.def("taylor_static", &taylor_static, py::arg("circuit"),
        py::arg("order") = 8);
  m.def("taylor_driven", &taylor_driven, py::arg("circuit"),
        py::arg("order") = 8);

  py::class_<WaoReport>(m, "WaoReport")
      .def_readonly("single_well", &WaoReport::single_well)
      .def_readonly("per_branch_limits", &WaoReport::per_branch_limits)
      .def_readonly("drive_headroom", &WaoReport::drive_headroom)
      .def_readonly("minima_count", &WaoReport::minima_count)
      .def_readonly("notes", &WaoReport::notes);

  m.def("truncate_flux", &truncate_flux, py::arg("phi_e"));
  m.def("single_jj_limit", &single_jj_limit, py::arg("ratio"));
  m.def("multi_jj_limit", &multi_jj_limit, py::arg("ratio"), py::arg("n"));
  m.def("drive_window", &drive_window, py::arg("circuit"));
  m.def("brute_force_minima", &brute_force_minima, py::arg("circuit"),
        py::arg("window") = 4.71238898038469, py::arg("points") = 20001);
  m.def("phase_slip_energy", &phase_slip_energy, py::arg("EJ"),
        py::arg("EC_junction"));
  m.def("wao_check", &wao_check, py::arg("circuit"));

  py::class_<ModeQuantization>(m, "ModeQuantization")
      .def_readonly("omega_static", &ModeQuantization::omega_static)
      .def_readonly("phi_zpf", &ModeQuantization::phi_zpf)
      .def_readonly("n_zpf", &ModeQuantization::n_zpf)
      .def_readonly("g_static", &ModeQuantization::g_static)
      .def_readonly("g_driven", &ModeQuantization::g_driven)
      .def_readonly("kerr_static", &ModeQuantization::kerr_static)
      .def_readonly("series", &ModeQuantization::series);

  m.def("quantize",
        py::overload_cast<const CircuitSpec&, int>(&quantize),
        py::arg("circuit"), py::arg("order") = 8);
  m.def("grid_transitions", &grid_transitions, py::arg("circuit"),
        py::arg("n_levels"), py::arg("points") = 2048, py::arg("span") = 0.0,
        py::arg("periodic") = false);

  py::class_<DesignSolution>(m, "DesignSolution")
      .def_readonly("branches", &DesignSolution::branches)
      .def_readonly("residual_c", &DesignSolution::residual_c)
      .def_readonly("keep_coefficient", &DesignSolution::keep_coefficient)
      .def_readonly("feasible", &DesignSolution::feasible)
      .def_readonly("diagnostics", &DesignSolution::diagnostics)
      .def("realize", &DesignSolution::realize, py::arg("EL_GHz") = 1.0,
           py::arg("EC_GHz") = 0.2, py::arg("n_L") = 0);

  m.def("design", [](const std::string& json_text) {
          return design(parse_design_problem(json_text));
        },
        py::arg("problem_json"));
  m.def("solve_vandermonde", [](const std::vector<int>& ns,
                                const std::vector<double>& targets) {
          const VandermondeResult r = solve_vandermonde(ns, targets);
          return py::make_tuple(r.x, r.det, r.condition);
        },
        py::arg("ns"), py::arg("targets"));

  py::class_<DriveShifts>(m, "DriveShifts")
      .def_readonly("delta_omega", &DriveShifts::delta_omega)
      .def_readonly("delta_kerr", &DriveShifts::delta_kerr);

  m.def("strong_drive_shifts", &strong_drive_shifts, py::arg("circuit"),
        py::arg("eps_d"));
  m.def("deformed_two_photon",
        [](const CircuitSpec& c, double d) { return deformed_two_photon(c, d); },
        py::arg("circuit"), py::arg("delta_phi_e1"));
  m.def("relative_dissipation", &relative_dissipation, py::arg("c1"),
        py::arg("c2"), py::arg("order"));

  py::class_<SimResult>(m, "SimResult")
      .def_readonly("times", &SimResult::times)
      .def_readonly("expectations", &SimResult::expectations)
      .def_readonly("fidelities", &SimResult::fidelities)
      .def_readonly("max_trace_drift", &SimResult::max_trace_drift)
      .def_readonly("min_eigenvalue", &SimResult::min_eigenvalue)
      .def_readonly("pure", &SimResult::pure);

  m.def("simulate", [](const std::string& scenario_json) {
          return evolve(parse_scenario(scenario_json));
        },
        py::arg("scenario_json"));

  m.def("table_report_json", [](int table) {
          return table_report_json(run_table_report(table));
        },
        py::arg("table"));
}
