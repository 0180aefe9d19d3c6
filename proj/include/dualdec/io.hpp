#ifndef DUALDEC_IO_HPP_
#define DUALDEC_IO_HPP_

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "dualdec/diagnostics.hpp"
#include "dualdec/engine.hpp"
#include "dualdec/network.hpp"
#include "dualdec/problem.hpp"
#include "dualdec/reference.hpp"

namespace dualdec {

using Json = nlohmann::json;

// Problem files:
//   {"m": 2, "p": 1, "agents": [{"n": 1,
//      "objective": {"q": [1], "Q": [[0]]},
//      "coupling": {"A": [[-1]], "b": [-0.5]},
//      "polytope": {"C": [], "d": [], "lb": [0], "ub": [1]}}]}
// Matrices are nested row arrays or flat row-major arrays; "Q" is optional.
Json problem_to_json(const CoupledProblem& problem);
CoupledProblem problem_from_json(const Json& j);

// Schedule files:
//   {"m": 3, "eta": 0.25, "window": 2, "matrices": [[[...]], ...]}
//   {"type": "alternating", "m": 4, "edges_a": [[0,1]], "edges_b": [[1,2]]}
//   {"type": "metropolis", "m": 4, "edges": [[0,1], [1,2]]}
Json schedule_to_json(const WeightSchedule& schedule);
WeightSchedule schedule_from_json(const Json& j);

Json reference_to_json(const CentralizedReference& reference);
CentralizedReference reference_from_json(const Json& j);

Json graph_report_to_json(const GraphReport& report);
Json slater_to_json(const SlaterReport& report);
Json lemma_constants_to_json(const LemmaConstants& constants);
Json bound_report_to_json(const BoundCheckReport& report);

/// Whole-file helpers; throw ValidationError on missing files or bad JSON.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// Shortest round-trip decimal ("%.17g"); "nan"/"inf" for non-finite values.
std::string format_double(double value);

/// k, step_size, obj_hat, obj_tilde, viol_hat_max, viol_tilde_max,
/// dual_disagreement, dual_dist_to_ref, sum_e_sq, max_e_norm, dual_gap,
/// then v_0..v_{p-1} when `with_average` is set.
void write_trace_csv(std::ostream& out, const RunTrace& trace, bool with_average = false);

/// Long format k, agent, row, lambda over the stored multiplier history.
void write_multipliers_csv(std::ostream& out, const RunTrace& trace);

/// N, lhs, rhs
void write_lemma_csv(std::ostream& out, const BoundCheckReport& report);

/// r, gap, min_gap, c_sum, product, running_max
void write_rate_csv(std::ostream& out, const std::vector<RateSample>& samples);

/// Final-iterate summary; objective gap fields only when `reference` is given.
Json trace_summary(const RunTrace& trace, const CentralizedReference* reference,
                   double zero_tol = 1e-6);

}  // namespace dualdec

#endif  // DUALDEC_IO_HPP_
