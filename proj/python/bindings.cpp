#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dualdec/diagnostics.hpp"
#include "dualdec/experiment.hpp"

namespace py = pybind11;
using namespace dualdec;

namespace {

// JSON crosses the boundary as text; the Python package parses it.
py::dict run_to_dict(const CoupledProblem& problem, const WeightSchedule& schedule,
                     const RunConfig& cfg, bool with_reference) {
  std::optional<CentralizedReference> reference;
  if (with_reference) reference = solve_centralized(problem);
  RunTrace trace;
  {
    py::gil_scoped_release release;
    trace = run(problem, schedule, cfg, reference);
  }
  std::vector<double> obj_hat, obj_tilde, viol_hat, viol_tilde, disagreement, max_e, gap;
  for (const auto& r : trace.records) {
    obj_hat.push_back(r.obj_hat);
    obj_tilde.push_back(r.obj_tilde);
    viol_hat.push_back(r.viol_hat_max);
    viol_tilde.push_back(r.viol_tilde_max);
    disagreement.push_back(r.dual_disagreement);
    max_e.push_back(r.max_e_norm);
    gap.push_back(r.dual_gap);
  }
  py::dict out;
  out["summary"] = trace_summary(trace, reference ? &*reference : nullptr).dump();
  out["multipliers"] = trace.final_lambda;
  out["x_hat"] = trace.final_x_hat;
  out["x_tilde"] = trace.final_x_tilde;
  out["obj_hat"] = obj_hat;
  out["obj_tilde"] = obj_tilde;
  out["viol_hat"] = viol_hat;
  out["viol_tilde"] = viol_tilde;
  out["dual_disagreement"] = disagreement;
  out["max_e_norm"] = max_e;
  out["dual_gap"] = gap;
  out["refresh_index"] = trace.refresh_index;
  if (reference) out["reference"] = reference_to_json(*reference).dump();
  return out;
}

}  // namespace

PYBIND11_MODULE(_dualdec, m) {
  m.doc() = "Distributed dual decomposition for coupled convex programs";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("generate_pev",
        [](std::size_t agents, std::size_t slots, std::uint64_t seed) {
          PevConfig c;
          c.m = agents;
          c.slots = slots;
          c.seed = seed;
          return problem_to_json(generate_pev(c).problem).dump();
        },
        py::arg("m") = 20, py::arg("slots") = 24, py::arg("seed") = 1);

  m.def("solve_centralized", [](const std::string& problem) {
    return reference_to_json(solve_centralized(problem_from_json(Json::parse(problem)))).dump();
  });

  m.def("check_slater", [](const std::string& problem) {
    return slater_to_json(check_slater(problem_from_json(Json::parse(problem)))).dump();
  });

  m.def("g_bound", [](const std::string& problem) {
    return compute_g_bound(problem_from_json(Json::parse(problem)));
  });

  m.def("make_schedule",
        [](const std::string& source, std::size_t agents, std::uint64_t seed) {
          return schedule_to_json(load_experiment_schedule(source, agents, seed)).dump();
        },
        py::arg("source"), py::arg("m"), py::arg("seed") = 0);

  m.def("validate_schedule",
        [](const std::string& schedule, std::size_t horizon) {
          const GraphReport r = validate_schedule(schedule_from_json(Json::parse(schedule)), horizon);
          Json j = graph_report_to_json(r);
          j["admissible"] = r.admissible();
          return j.dump();
        },
        py::arg("schedule"), py::arg("horizon") = 0);

  m.def("run",
        [](const std::string& problem, const std::string& schedule, std::size_t iterations,
           double beta, double refresh_threshold, std::optional<std::size_t> refresh_window,
           std::uint64_t seed, std::size_t threads, bool full_diagnostics, bool reference) {
          RunConfig cfg;
          cfg.iterations = iterations;
          cfg.step_size = StepSizeSchedule::harmonic(beta);
          cfg.refresh_threshold = refresh_threshold;
          cfg.refresh_window = refresh_window;
          cfg.seed = seed;
          cfg.threads = threads;
          cfg.diagnostics = full_diagnostics ? DiagnosticsLevel::Full : DiagnosticsLevel::Basic;
          const CoupledProblem p = problem_from_json(Json::parse(problem));
          const WeightSchedule s = schedule_from_json(Json::parse(schedule));
          return run_to_dict(p, s, cfg, reference);
        },
        py::arg("problem"), py::arg("schedule"), py::arg("iterations") = 1000,
        py::arg("beta") = 1.0, py::arg("refresh_threshold") = 1e-5,
        py::arg("refresh_window") = py::none(), py::arg("seed") = 0, py::arg("threads") = 1,
        py::arg("full_diagnostics") = false, py::arg("reference") = true);

  m.def("dual_update", &dual_update, py::arg("mixed"), py::arg("step"), py::arg("g"));
  m.def("primal_average_update", &primal_average_update, py::arg("x_hat"), py::arg("x_new"),
        py::arg("step"), py::arg("step_sum"));
}
