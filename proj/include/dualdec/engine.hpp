#ifndef DUALDEC_ENGINE_HPP_
#define DUALDEC_ENGINE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dualdec/network.hpp"
#include "dualdec/problem.hpp"
#include "dualdec/reference.hpp"

namespace dualdec {

/// Positive, non-increasing step sizes c(k).
class StepSizeSchedule {
 public:
  /// c(k) = beta / (k + 1)
  static StepSizeSchedule harmonic(double beta = 1.0);
  /// Explicit prefix; the last value is held for k beyond it.
  static StepSizeSchedule custom(std::vector<double> values);

  double operator()(std::size_t k) const;
  bool is_harmonic() const { return values_.empty(); }
  double beta() const { return beta_; }

 private:
  StepSizeSchedule(double beta, std::vector<double> values);

  double beta_;
  std::vector<double> values_;
};

enum class DiagnosticsLevel {
  Basic,
  /// Also evaluates phi_i(v(k)) each iteration and stores multiplier and
  /// running-average trajectories.
  Full,
};

struct RunConfig {
  std::size_t iterations = 1000;
  StepSizeSchedule step_size = StepSizeSchedule::harmonic(1.0);
  double refresh_threshold = 1e-5;
  /// Consecutive sub-threshold iterations before the x-tilde restart;
  /// defaults to the number of agents.
  std::optional<std::size_t> refresh_window;
  std::uint64_t seed = 0;
  DiagnosticsLevel diagnostics = DiagnosticsLevel::Basic;
  /// Keep lambda_i(k) and x_hat(k) for every k (always on with Full).
  bool record_history = false;
  /// Worker threads for the per-agent part of a round (1 = inline).
  std::size_t threads = 1;
  /// Stop once every agent has restarted x-tilde and the dual disagreement
  /// is below refresh_threshold.
  bool stop_when_converged = false;

  void validate() const;
};

/// Per-agent quantities carried between rounds.
struct AgentState {
  Vector lambda;  ///< lambda_i(k)
  Vector mixed;   ///< lambda-hat_i(k-1), the last mixed estimate
  Vector x;       ///< x_i(k)
  Vector x_hat;   ///< c-weighted running average of x_i
  Vector x_tilde; ///< x_hat, restarted once the dual updates settle
  double last_e_norm = 0.0;
  std::optional<std::size_t> k_s;  ///< iteration at which x_tilde restarted
  std::size_t consecutive_below = 0;
  double c_sum_since_refresh = 0.0;
};

/// Step 8 in closed form: [mixed + c * g]_+.
Vector dual_update(const Vector& mixed, double step, const Vector& g_value);

/// Step 9: x_hat + (c_k / c_cumulative) (x_new - x_hat); c_cumulative includes c_k.
Vector primal_average_update(const Vector& x_hat, const Vector& x_new, double c_k,
                             double c_cumulative);

/// Advances the x-tilde sequence of one agent for step k. `e_norm` is
/// ||lambda_i(k+1) - lambda-hat_i(k)||. Before the restart x_tilde tracks
/// x_hat (which must already hold x_hat(k+1)).
void refresh_update(AgentState& state, std::size_t k, const Vector& x_new, double c_k,
                    double e_norm, double threshold, std::size_t window);

/// Metrics of iterate k (produced by step k-1).
struct IterationRecord {
  std::size_t k = 0;
  double step_size = 0.0;  ///< c(k-1), the step that produced this iterate
  double obj_hat = 0.0;
  double obj_tilde = 0.0;
  Vector viol_hat;    ///< max(sum_i g_i(x_hat_i), 0)
  Vector viol_tilde;
  double viol_hat_max = 0.0;
  double viol_tilde_max = 0.0;
  Vector v;                        ///< average multiplier v(k)
  double dual_disagreement = 0.0;  ///< max_i ||lambda_i(k) - v(k)||
  double sum_disagreement = 0.0;   ///< sum_i ||lambda_i(k) - v(k)||
  double sum_e_sq = 0.0;           ///< sum_i ||e_i(k)||^2
  double max_e_norm = 0.0;
  double max_lambda_norm = 0.0;
  /// sum_i |phi_i(lambda-hat_i(k-1)) - phi_i(v(k-1))|; NaN unless Full.
  double dual_gap = 0.0;
  double dual_dist_to_ref = 0.0;  ///< max_i ||lambda_i(k) - lambda*||; NaN without reference
  double primal_gap_hat = 0.0;    ///< |obj_hat - f*|; NaN without reference
  double primal_gap_tilde = 0.0;
};

struct RunTrace {
  std::size_t m = 0;
  Index p = 0;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> records;  ///< records[k-1] describes iterate k
  std::vector<double> initial_lambda_norms;  ///< ||lambda_i(0)||
  std::vector<double> initial_e_norms;       ///< ||e_i(1)||
  double initial_step = 0.0;                 ///< c(0)
  std::vector<std::optional<std::size_t>> refresh_index;  ///< k_s per agent
  /// With recorded history: lambda_i(k) as m x p, for k = 0..K.
  std::vector<Matrix> multipliers;
  /// With recorded history: stacked x_hat(k) for k = 0..K.
  std::vector<Vector> x_hat_history;
  std::vector<Vector> final_x_hat;
  std::vector<Vector> final_x_tilde;
  Matrix final_lambda;
  bool has_reference = false;
  double f_star = 0.0;

  std::size_t iterations() const { return records.size(); }
};

/**
 * Synchronous-round simulation of the distributed dual-decomposition scheme.
 *
 * Each round: every agent mixes the frozen round-k estimates, solves its local
 * program, takes a projected dual step and updates its running averages. The
 * per-agent work may run on several threads; results do not depend on it.
 */
class Engine {
 public:
  Engine(const CoupledProblem& problem, const WeightSchedule& schedule, RunConfig config);

  /// lambda_i(0) = 0 (or the supplied rows) and x_hat_i(0) = argmin f_i over X_i.
  void initialize(std::optional<Matrix> initial_lambda = std::nullopt);
  /// Executes one round and returns its record.
  IterationRecord step();
  /// initialize() if needed, then `config.iterations` rounds.
  RunTrace run(const std::optional<CentralizedReference>& reference = std::nullopt);

  std::size_t iteration() const { return k_; }
  const std::vector<AgentState>& agents() const { return states_; }
  Matrix multipliers() const;
  std::size_t refresh_window() const { return window_; }

 private:
  void advance_agent(std::size_t i, const Vector& mixed, const Vector& average, double c_k,
                     double c_cumulative, double& phi_gap);

  const CoupledProblem& problem_;
  const WeightSchedule& schedule_;
  RunConfig config_;
  std::size_t window_;
  std::vector<AgentState> states_;
  std::vector<double> e_norm_sq_;
  std::size_t k_ = 0;
  double c_cumulative_ = 0.0;
  bool initialized_ = false;
  const CentralizedReference* reference_ = nullptr;
};

/// Convenience wrapper: Engine(problem, schedule, config).run(reference).
RunTrace run(const CoupledProblem& problem, const WeightSchedule& schedule,
             const RunConfig& config,
             const std::optional<CentralizedReference>& reference = std::nullopt);

}  // namespace dualdec

#endif  // DUALDEC_ENGINE_HPP_
