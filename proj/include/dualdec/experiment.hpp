#ifndef DUALDEC_EXPERIMENT_HPP_
#define DUALDEC_EXPERIMENT_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dualdec/engine.hpp"
#include "dualdec/io.hpp"
#include "dualdec/pev.hpp"

namespace dualdec {

struct ExperimentSpec {
  /// JSON problem file; when empty the PEV generator is used.
  std::string problem_path;
  PevConfig pev;
  /// "alternating" (random geometric graph split in two groups),
  /// "metropolis" (same graph, static) or a schedule JSON file.
  std::string schedule = "alternating";
  RunConfig run;
  std::string out_dir;
  bool solve_reference = true;
  /// Tolerances for the time-to-tolerance comparison.
  double violation_tol = 1e-3;
  double gap_tol = 1e-2;

  void validate() const;
};

struct SequenceCurve {
  std::size_t k = 0;
  double obj_hat = 0.0;
  double obj_tilde = 0.0;
  double viol_hat = 0.0;
  double viol_tilde = 0.0;
};

struct CompareReport {
  std::vector<SequenceCurve> curves;
  /// First k with violation <= tol and relative gap <= tol (gap ignored
  /// without a reference value).
  std::optional<std::size_t> first_hat;
  std::optional<std::size_t> first_tilde;
  std::size_t refresh_triggered = 0;
  std::optional<std::size_t> earliest_refresh;
  bool identical = false;  ///< x_tilde never differed from x_hat
};

/// Relative gap is |obj - f*| / max(1, |f*|).
CompareReport compare_sequences(const RunTrace& trace, std::optional<double> f_star,
                                double violation_tol, double gap_tol);

/// Summary fields only; the curves live in the trace CSV.
Json compare_to_json(const CompareReport& report);

struct ExperimentResult {
  RunTrace trace;
  std::optional<CentralizedReference> reference;
  CompareReport comparison;
  std::vector<std::string> files;
};

/// Loads or generates the problem, builds the schedule, optionally solves the
/// reference, runs the engine and writes trace.csv, multipliers.csv,
/// summary.json and compare.json into out_dir (skipped when out_dir is empty).
/// Files written before a failure are removed.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Problem described by `spec` (file or PEV generator).
CoupledProblem load_experiment_problem(const ExperimentSpec& spec);

/// Schedule described by `source` for m agents; `seed` drives the random graph.
WeightSchedule load_experiment_schedule(const std::string& source, std::size_t m,
                                        std::uint64_t seed);

}  // namespace dualdec

#endif  // DUALDEC_EXPERIMENT_HPP_
