#include "dualdec/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dualdec/io.hpp"

namespace dualdec {

namespace fs = std::filesystem;

void ExperimentSpec::validate() const {
  if (!problem_path.empty()) {
    require(fs::exists(problem_path), "experiment: problem file " + problem_path + " not found");
  } else {
    pev.validate();
  }
  if (schedule != "alternating" && schedule != "metropolis") {
    require(fs::exists(schedule), "experiment: schedule file " + schedule + " not found");
  }
  run.validate();
  require(violation_tol > 0.0 && gap_tol > 0.0, "experiment: tolerances must be positive");
}

CompareReport compare_sequences(const RunTrace& trace, std::optional<double> f_star,
                                double violation_tol, double gap_tol) {
  CompareReport report;
  const double scale = f_star ? std::max(1.0, std::abs(*f_star)) : 1.0;
  auto within = [&](double obj, double viol) {
    if (viol > violation_tol) return false;
    return !f_star || std::abs(obj - *f_star) / scale <= gap_tol;
  };
  report.identical = true;
  report.curves.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    report.curves.push_back({r.k, r.obj_hat, r.obj_tilde, r.viol_hat_max, r.viol_tilde_max});
    if (!report.first_hat && within(r.obj_hat, r.viol_hat_max)) report.first_hat = r.k;
    if (!report.first_tilde && within(r.obj_tilde, r.viol_tilde_max)) report.first_tilde = r.k;
    report.identical = report.identical && r.obj_hat == r.obj_tilde &&
                       r.viol_hat_max == r.viol_tilde_max;
  }
  for (const auto& ks : trace.refresh_index) {
    if (!ks) continue;
    ++report.refresh_triggered;
    if (!report.earliest_refresh || *ks < *report.earliest_refresh) report.earliest_refresh = ks;
  }
  return report;
}

CoupledProblem load_experiment_problem(const ExperimentSpec& spec) {
  if (!spec.problem_path.empty()) return problem_from_json(read_json_file(spec.problem_path));
  return generate_pev(spec.pev).problem;
}

WeightSchedule load_experiment_schedule(const std::string& source, std::size_t m,
                                        std::uint64_t seed) {
  if (source == "alternating" || source == "metropolis") {
    if (m == 1) return WeightSchedule({Matrix::Ones(1, 1)}, 0.5, 1);
    const auto edges = random_geometric_graph(m, seed);
    if (source == "metropolis") return static_metropolis_schedule(m, edges);
    const auto [a, b] = split_alternating(edges);
    return alternating_partition_schedule(m, a, b);
  }
  WeightSchedule schedule = schedule_from_json(read_json_file(source));
  require(schedule.num_agents() == m, "experiment: schedule size does not match the problem");
  return schedule;
}

Json compare_to_json(const CompareReport& c) {
  auto opt = [](const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); };
  return {{"first_hat", opt(c.first_hat)},
          {"first_tilde", opt(c.first_tilde)},
          {"refresh_triggered", c.refresh_triggered},
          {"earliest_refresh", opt(c.earliest_refresh)},
          {"identical", c.identical}};
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::string> written;
  try {
    const CoupledProblem problem = load_experiment_problem(spec);
    const WeightSchedule schedule =
        load_experiment_schedule(spec.schedule, problem.num_agents(), spec.run.seed);

    ExperimentResult result;
    if (spec.solve_reference) result.reference = solve_centralized(problem);
    RunConfig config = spec.run;
    config.record_history = config.record_history || !spec.out_dir.empty();
    result.trace = run(problem, schedule, config, result.reference);
    result.comparison = compare_sequences(
        result.trace,
        result.reference ? std::optional<double>(result.reference->f_star) : std::nullopt,
        spec.violation_tol, spec.gap_tol);

    if (!spec.out_dir.empty()) {
      fs::create_directories(spec.out_dir);
      auto open = [&](const char* name) {
        const std::string path = (fs::path(spec.out_dir) / name).string();
        std::ofstream out(path);
        require(out.good(), "cannot write " + path);
        written.push_back(path);
        return out;
      };
      {
        auto out = open("trace.csv");
        write_trace_csv(out, result.trace, true);
      }
      {
        auto out = open("multipliers.csv");
        write_multipliers_csv(out, result.trace);
      }
      {
        Json summary = trace_summary(result.trace, result.reference ? &*result.reference : nullptr);
        summary["schedule"] = spec.schedule;
        summary["problem"] = spec.problem_path.empty() ? Json("pev") : Json(spec.problem_path);
        auto out = open("summary.json");
        out << summary.dump(2) << '\n';
      }
      {
        auto out = open("compare.json");
        out << compare_to_json(result.comparison).dump(2) << '\n';
      }
    }
    result.files = written;
    return result;
  } catch (...) {
    std::error_code ec;
    for (const auto& path : written) fs::remove(path, ec);
    throw;
  }
}

}  // namespace dualdec
