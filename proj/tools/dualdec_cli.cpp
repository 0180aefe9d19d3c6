#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "dualdec/diagnostics.hpp"
#include "dualdec/experiment.hpp"
#include "dualdec/io.hpp"
#include "dualdec/pev.hpp"

namespace fs = std::filesystem;
using namespace dualdec;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct RunFlags {
  std::string problem;
  std::size_t pev_m = 20;
  std::string schedule = "alternating";
  std::size_t iters = 1000;
  double beta = 1.0;
  double threshold = 1e-5;
  std::size_t window = 0;
  std::uint64_t seed = 1;
  std::string diagnostics = "basic";
  std::size_t threads = 1;
  bool no_reference = false;
  std::string out;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--problem", f.problem, "Problem JSON (default: generated PEV instance)");
  cmd->add_option("--pev-m", f.pev_m, "Fleet size of the generated PEV instance");
  cmd->add_option("--schedule", f.schedule, "alternating | metropolis | schedule JSON file");
  cmd->add_option("--iters", f.iters, "Iteration budget")->check(CLI::PositiveNumber);
  cmd->add_option("--beta", f.beta, "Step size c(k) = beta/(k+1)")->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", f.threshold, "Refresh threshold on ||e_i||")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--window", f.window, "Refresh window (default: number of agents)");
  cmd->add_option("--seed", f.seed, "Seed for generated problem and network");
  cmd->add_option("--diagnostics", f.diagnostics, "basic | full")
      ->check(CLI::IsMember({"basic", "full"}));
  cmd->add_option("--threads", f.threads, "Worker threads per round")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-reference", f.no_reference, "Skip the centralized reference solve");
  cmd->add_option("--out", f.out, "Output directory");
}

ExperimentSpec to_spec(const RunFlags& f) {
  ExperimentSpec spec;
  spec.problem_path = f.problem;
  spec.pev.m = f.pev_m;
  spec.pev.seed = f.seed;
  spec.schedule = f.schedule;
  spec.run.iterations = f.iters;
  spec.run.step_size = StepSizeSchedule::harmonic(f.beta);
  spec.run.refresh_threshold = f.threshold;
  if (f.window > 0) spec.run.refresh_window = f.window;
  spec.run.seed = f.seed;
  spec.run.diagnostics = f.diagnostics == "full" ? DiagnosticsLevel::Full : DiagnosticsLevel::Basic;
  spec.run.threads = f.threads;
  spec.solve_reference = !f.no_reference;
  spec.out_dir = f.out;
  return spec;
}

void emit(const std::string& out_dir, const char* name, const Json& j) {
  if (out_dir.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  fs::create_directories(out_dir);
  write_json_file((fs::path(out_dir) / name).string(), j);
}

CoupledProblem toy_problem() {
  std::vector<AgentProblem> agents;
  for (int i = 0; i < 2; ++i) {
    Matrix A(1, 1);
    A << -1.0;
    Vector b(1);
    b << -0.5;
    agents.emplace_back(ObjectiveForm::linear(Vector::Ones(1)), CouplingMap{A, b},
                        Polytope{Matrix(0, 1), Vector(0), Vector::Zero(1), Vector::Ones(1)});
  }
  return CoupledProblem(std::move(agents), 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed dual decomposition over time-varying networks"};
  app.require_subcommand(1);

  std::string gen_kind = "pev";
  PevConfig pev;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Write a problem JSON");
  gen->add_option("--kind", gen_kind, "pev | toy")->check(CLI::IsMember({"pev", "toy"}));
  gen->add_option("--m", pev.m, "Fleet size")->check(CLI::PositiveNumber);
  gen->add_option("--slots", pev.slots, "Time slots")->check(CLI::PositiveNumber);
  gen->add_option("--seed", pev.seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output directory (problem.json); stdout if omitted");

  std::string val_problem;
  std::string val_schedule;
  std::uint64_t val_seed = 1;
  std::size_t val_horizon = 0;
  auto* val = app.add_subcommand("validate", "Check Slater, G and the network conditions");
  val->add_option("--problem", val_problem, "Problem JSON")->required();
  val->add_option("--schedule", val_schedule, "alternating | metropolis | schedule JSON file");
  val->add_option("--seed", val_seed, "Seed for generated networks");
  val->add_option("--horizon", val_horizon, "Iterations checked (default: T * m)");

  std::string ref_problem;
  std::string ref_out;
  auto* ref = app.add_subcommand("solve-central", "Solve the coupled program directly");
  ref->add_option("--problem", ref_problem, "Problem JSON")->required();
  ref->add_option("--out", ref_out, "Output directory (reference.json); stdout if omitted");

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run the distributed iteration");
  add_run_flags(run_cmd, run_flags);

  RunFlags diag_flags;
  diag_flags.diagnostics = "full";
  double alpha1 = 0.0;
  std::size_t horizon = 0;
  auto* diag = app.add_subcommand("diagnose", "Consensus bound and rate reports");
  add_run_flags(diag, diag_flags);
  diag->add_option("--alpha1", alpha1, "alpha1 (default 0.5/(1+G))");
  diag->add_option("--horizon", horizon, "Largest N checked (default: iterations - 1)");

  RunFlags cmp_flags;
  double cmp_viol = 1e-3;
  double cmp_gap = 1e-2;
  auto* cmp = app.add_subcommand("compare", "Time-to-tolerance of the plain and refreshed averages");
  add_run_flags(cmp, cmp_flags);
  cmp->add_option("--violation-tol", cmp_viol, "Violation tolerance");
  cmp->add_option("--gap-tol", cmp_gap, "Relative objective gap tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*gen) {
      const Json j = gen_kind == "toy" ? problem_to_json(toy_problem())
                                       : problem_to_json(generate_pev(pev).problem);
      emit(gen_out, "problem.json", j);
      return 0;
    }

    if (*val) {
      const CoupledProblem problem = problem_from_json(read_json_file(val_problem));
      const SlaterReport slater = check_slater(problem);
      Json out{{"slater", slater_to_json(slater)}, {"G", compute_g_bound(problem)}};
      bool ok = slater.holds;
      if (!val_schedule.empty()) {
        const WeightSchedule s = load_experiment_schedule(val_schedule, problem.num_agents(), val_seed);
        const GraphReport g = validate_schedule(s, val_horizon);
        out["schedule"] = graph_report_to_json(g);
        out["schedule"]["eta"] = s.eta();
        out["schedule"]["T"] = s.window();
        ok = ok && g.admissible();
      }
      std::cout << out.dump(2) << '\n';
      return ok ? 0 : kExitValidation;
    }

    if (*ref) {
      const CoupledProblem problem = problem_from_json(read_json_file(ref_problem));
      emit(ref_out, "reference.json", reference_to_json(solve_centralized(problem)));
      return 0;
    }

    if (*run_cmd) {
      const ExperimentResult r = run_experiment(to_spec(run_flags));
      if (run_flags.out.empty()) {
        std::cout << trace_summary(r.trace, r.reference ? &*r.reference : nullptr).dump(2) << '\n';
      }
      return 0;
    }

    if (*diag) {
      ExperimentSpec spec = to_spec(diag_flags);
      const CoupledProblem problem = load_experiment_problem(spec);
      const WeightSchedule schedule =
          load_experiment_schedule(spec.schedule, problem.num_agents(), spec.run.seed);
      std::optional<CentralizedReference> reference;
      if (spec.solve_reference) reference = solve_centralized(problem);
      const RunTrace trace = run(problem, schedule, spec.run, reference);

      const double G = compute_g_bound(problem);
      const LemmaConstants c =
          lemma1_constants(schedule, trace, alpha1 > 0.0 ? alpha1 : default_alpha1(G), G);
      const std::size_t N = horizon > 0 ? horizon : trace.iterations() - 1;
      const BoundCheckReport bound = check_lemma1(trace, c, N);
      const ConsensusTrends trends = consensus_trends(trace);
      Json out{{"constants", lemma_constants_to_json(c)},
               {"lemma", bound_report_to_json(bound)},
               {"trends",
                {{"total_sum_e_sq", trends.total_sum_e_sq},
                 {"tail_increase", trends.tail_increase},
                 {"final_max_e", trends.final_max_e},
                 {"early_max_e", trends.early_max_e},
                 {"final_disagreement", trends.final_disagreement}}}};
      std::vector<RateSample> rate;
      if (spec.run.diagnostics == DiagnosticsLevel::Full) {
        rate = dual_gap_rate(trace);
        out["rate"] = {{"final_product", rate.back().product},
                       {"running_max", rate.back().running_max},
                       {"running_max_change", rate_running_max_change(rate)}};
      }
      if (!spec.out_dir.empty()) {
        fs::create_directories(spec.out_dir);
        std::ofstream lemma((fs::path(spec.out_dir) / "lemma1.csv").string());
        write_lemma_csv(lemma, bound);
        if (!rate.empty()) {
          std::ofstream rate_out((fs::path(spec.out_dir) / "rate.csv").string());
          write_rate_csv(rate_out, rate);
        }
      }
      emit(spec.out_dir, "diagnostics.json", out);
      return 0;
    }

    if (*cmp) {
      ExperimentSpec spec = to_spec(cmp_flags);
      spec.violation_tol = cmp_viol;
      spec.gap_tol = cmp_gap;
      const ExperimentResult r = run_experiment(spec);
      if (cmp_flags.out.empty()) std::cout << compare_to_json(r.comparison).dump(2) << '\n';
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Json::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitSolver;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
