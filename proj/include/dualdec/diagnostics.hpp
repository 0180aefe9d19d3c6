#ifndef DUALDEC_DIAGNOSTICS_HPP_
#define DUALDEC_DIAGNOSTICS_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "dualdec/engine.hpp"
#include "dualdec/network.hpp"
#include "dualdec/reference.hpp"

namespace dualdec {

/// v = (1/m) sum_i lambda_i over the rows of an m x p matrix.
Vector consensus_average(const Matrix& lambdas);

struct LemmaConstants {
  double eta = 0.0;
  std::size_t m = 0;
  std::size_t T = 0;
  double psi = 0.0;
  double q = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double G = 0.0;
  /// sup_k max_i ||lambda_i(k)|| observed in the trace.
  double D = 0.0;
  /// Run quantities folded into alpha3, kept to detect a mismatched trace.
  double c0 = 0.0;
  double c1 = 0.0;
  double sum_e1_sq = 0.0;
  double sum_lambda0 = 0.0;

  /// 1 - alpha1 (1 + G) > 0
  bool alpha1_admissible() const { return 1.0 - alpha1 * (1.0 + G) > 0.0; }
};

/// 0.5 / (1 + G)
double default_alpha1(double G);

/// Constants for `schedule` (its declared eta and T) and the first two steps of
/// `trace`. Throws ValidationError for eta outside (0,1), T < 1, m < 2,
/// alpha1 <= 0 or a trace with fewer than two records.
LemmaConstants lemma1_constants(const WeightSchedule& schedule, const RunTrace& trace,
                                double alpha1, double G);

struct BoundSample {
  std::size_t N = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct BoundCheckReport {
  std::vector<BoundSample> samples;  ///< N = 0..horizon
  bool holds_for_all_N = false;
  double margin_min = 0.0;           ///< min over N of rhs - lhs
  std::optional<std::size_t> first_violation;
  /// False when the constants were not built from this trace.
  bool consistent = true;
};

/// Evaluates 2 sum_{k=1}^N c(k) sum_i ||lambda_i(k+1) - v(k+1)|| against
/// alpha1 sum_{k=1}^N sum_i ||e_i(k+1)||^2 + alpha2 sum_{k=1}^N c(k)^2 + alpha3
/// for N = 0..horizon. Requires horizon <= trace.iterations() - 1.
BoundCheckReport check_lemma1(const RunTrace& trace, const LemmaConstants& constants,
                              std::size_t horizon);

struct RateSample {
  std::size_t r = 0;
  double gap = 0.0;      ///< sum_i |phi_i(lambda-hat_i(r)) - phi_i(v(r))|
  double min_gap = 0.0;  ///< min over k <= r
  double c_sum = 0.0;    ///< sum_{k<=r} c(k)
  double product = 0.0;
  double running_max = 0.0;  ///< max over r' <= r of product
};

/// Needs a trace recorded with DiagnosticsLevel::Full.
std::vector<RateSample> dual_gap_rate(const RunTrace& trace);

/// (running_max(end) - running_max(mid)) / running_max(end) where mid is the
/// first sample of the second half; 0 when the running maximum is 0.
double rate_running_max_change(const std::vector<RateSample>& samples);

struct ConsensusTrends {
  double total_sum_e_sq = 0.0;
  /// Increase of the partial sums of sum_i ||e_i||^2 over the final `tail_fraction`.
  double tail_increase = 0.0;
  double final_max_e = 0.0;
  double early_max_e = 0.0;  ///< max over the first 10 iterates
  double final_disagreement = 0.0;
};

ConsensusTrends consensus_trends(const RunTrace& trace, double tail_fraction = 0.1);

struct ReferenceDistance {
  std::size_t k = 0;
  double dual_distance = 0.0;  ///< max_i ||lambda_i(k) - lambda*||
  double objective_gap = 0.0;  ///< |sum_i f_i(x_hat_i(k)) - f*|
  double violation = 0.0;      ///< max component of max(sum_i g_i(x_hat_i(k)), 0)
  /// ||x_hat(k) - x*||; only when the reference is certified unique and the
  /// trace keeps x_hat history.
  std::optional<double> point_distance;
};

/// One entry per iterate k = 1..K. Multiplier distances come from the stored
/// multiplier history (Full) or from records of a run that had the reference.
std::vector<ReferenceDistance> distance_to_reference(const RunTrace& trace,
                                                     const CentralizedReference& reference);

}  // namespace dualdec

#endif  // DUALDEC_DIAGNOSTICS_HPP_
