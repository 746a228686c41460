#include "hnoma/bb.hpp"
#include "hnoma/channel.hpp"
#include "hnoma/experiment.hpp"
#include "hnoma/model.hpp"
#include "hnoma/sca.hpp"
#include "hnoma/two_user.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hnoma;

namespace {

using Rows = std::vector<std::vector<double>>;

LowerTriangular from_rows(const Rows& rows) {
  const int n = static_cast<int>(rows.size());
  LowerTriangular t(n);
  for (int m = 0; m < n; ++m) {
    if (static_cast<int>(rows[m].size()) != m + 1) {
      throw std::invalid_argument("row " + std::to_string(m) + " must have " +
                                  std::to_string(m + 1) + " entries");
    }
    for (int i = 0; i <= m; ++i) t(m, i) = rows[m][i];
  }
  return t;
}

Rows to_rows(const LowerTriangular& t) {
  Rows rows(t.size());
  for (int m = 0; m < t.size(); ++m) {
    for (int i = 0; i <= m; ++i) rows[m].push_back(t(m, i));
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_hnoma, mod) {
  mod.doc() = "Minimum-power allocation for backscatter-assisted hybrid NOMA uplinks";

  py::register_exception<CertificationConflict>(mod, "CertificationConflict");
  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(mod, "ParseError", PyExc_ValueError);

  py::enum_<SolveStatus>(mod, "SolveStatus")
      .value("Optimal", SolveStatus::Optimal)
      .value("Converged", SolveStatus::Converged)
      .value("IterLimit", SolveStatus::IterLimit)
      .value("Infeasible", SolveStatus::Infeasible)
      .value("NumericalFailure", SolveStatus::NumericalFailure);

  py::enum_<CandidateKind>(mod, "CandidateKind")
      .value("OMA", CandidateKind::OMA)
      .value("PNomaI", CandidateKind::PNomaI)
      .value("PNomaII", CandidateKind::PNomaII)
      .value("HNomaI", CandidateKind::HNomaI)
      .value("HNomaII", CandidateKind::HNomaII)
      .value("HNomaIII", CandidateKind::HNomaIII);

  py::enum_<FeasMode>(mod, "FeasMode").value("SRA", FeasMode::SRA).value("SCA", FeasMode::SCA);

  py::class_<SystemInstance>(mod, "SystemInstance")
      .def(py::init([](const Rows& gamma, double rate) {
             return SystemInstance(from_rows(gamma), rate);
           }),
           py::arg("gamma"), py::arg("target_rate"),
           "gamma holds the lower triangle row by row: [[g00], [g10, g11], ...]")
      .def_property_readonly("num_users", &SystemInstance::num_users)
      .def_property_readonly("target_rate", &SystemInstance::target_rate)
      .def_property_readonly("eps", &SystemInstance::eps)
      .def_property_readonly("gamma", [](const SystemInstance& s) { return to_rows(s.gains()); })
      .def("to_text", [](const SystemInstance& s) { return to_text(s); })
      .def_static("from_text", &parse_instance);

  py::class_<PowerProfile>(mod, "PowerProfile")
      .def(py::init([](const Rows& p) { return PowerProfile(from_rows(p)); }), py::arg("powers"))
      .def_property_readonly("num_users", &PowerProfile::num_users)
      .def_property_readonly("powers", [](const PowerProfile& p) { return to_rows(p.values()); })
      .def_property_readonly("reflection",
                             [](const PowerProfile& p) { return to_rows(to_reflection(p)); })
      .def_property_readonly("total", [](const PowerProfile& p) { return total_power(p); });

  py::class_<SolveReport>(mod, "SolveReport")
      .def_readonly("objective", &SolveReport::objective)
      .def_readonly("profile", &SolveReport::profile)
      .def_readonly("status", &SolveReport::status)
      .def_readonly("upper_bound", &SolveReport::upper_bound)
      .def_readonly("lower_bound", &SolveReport::lower_bound)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("trace", &SolveReport::trace)
      .def_property_readonly("oracle_calls",
                             [](const SolveReport& r) { return r.oracle.feasibility_calls; })
      .def_property_readonly("oracle_work", [](const SolveReport& r) { return r.oracle.work; });

  mod.def("rate_in_slot", &rate_in_slot, py::arg("instance"), py::arg("profile"), py::arg("m"),
          py::arg("i"));
  mod.def("total_rate", &total_rate, py::arg("instance"), py::arg("profile"), py::arg("m"));
  mod.def("is_feasible", &is_feasible, py::arg("instance"), py::arg("profile"),
          py::arg("rate_tol") = kDefaultRateTol);
  mod.def("oma_profile", &oma_profile, py::arg("instance"));
  mod.def("oma_total_power", &oma_total_power, py::arg("instance"));

  mod.def(
      "solve_two_user",
      [](double gamma0, double gamma1, double gamma2, double rate) {
        TwoUserInstance t;
        t.gamma0 = gamma0;
        t.gamma1 = gamma1;
        t.gamma2 = gamma2;
        t.rate = rate;
        const auto rep = solve_two_user(t);
        return py::make_tuple(rep.report, rep.kind, classify_solution(rep));
      },
      py::arg("gamma0"), py::arg("gamma1"), py::arg("gamma2"), py::arg("rate"),
      "Returns (report, kind, label).");

  mod.def(
      "sca_solve",
      [](const SystemInstance& inst, double rel_tol, int max_iter) {
        ScaOptions o;
        o.rel_tol = rel_tol;
        o.max_iter = max_iter;
        return sca_solve(inst, {}, o);
      },
      py::arg("instance"), py::arg("rel_tol") = 1e-5, py::arg("max_iter") = 100);

  mod.def(
      "bb_solve",
      [](const SystemInstance& inst, double xi, int n_max, FeasMode mode) {
        BBConfig cfg;
        cfg.xi = xi;
        cfg.n_max = n_max;
        cfg.feas_mode = mode;
        return bb_solve(inst, cfg).report;
      },
      py::arg("instance"), py::arg("xi") = 0.0, py::arg("n_max") = 1000,
      py::arg("feas_mode") = FeasMode::SRA, "xi <= 0 selects 1e-3 times the OMA total.");

  mod.def(
      "sample_instance",
      [](const std::string& scenario_text, std::uint64_t seed) {
        auto cfg = parse_scenario(scenario_text);
        cfg.seed = seed;
        return sample_instance(cfg);
      },
      py::arg("scenario") = "", py::arg("seed") = 1,
      "Draws an instance from 'key = value' scenario text.");

  mod.def(
      "run_figure",
      [](const std::string& name, int trials, std::uint64_t seed) {
        auto spec = fig_mode(name);
        if (trials > 0) spec.trials = trials;
        spec.master_seed = seed;
        return to_csv(run_experiment(spec));
      },
      py::arg("name"), py::arg("trials") = 0, py::arg("seed") = 1, "Runs a preset; returns CSV.");
}
