#ifndef DUALDEC_LP_HPP_
#define DUALDEC_LP_HPP_

#include <cstddef>

#include "dualdec/types.hpp"

namespace dualdec {

/**
 * Dense linear program
 *
 *   min  c^T x
 *   s.t. C x <= d,  lb <= x <= ub
 *
 * Every bound must be finite.
 */
struct LpProblem {
  Vector cost;
  Matrix rows;  ///< C, r x n (r may be 0)
  Vector rhs;   ///< d, length r
  Vector lower;
  Vector upper;

  Index num_vars() const { return cost.size(); }
  Index num_rows() const { return rows.rows(); }

  /// Throws ValidationError on inconsistent dimensions, NaNs or infinite bounds.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

/**
 * Result of an LP or QP solve.
 *
 * When optimal, the multipliers satisfy
 *   grad f(x) + C^T duals - bound_lower + bound_upper = 0
 * with every multiplier nonnegative and complementary to its constraint.
 */
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  Vector duals;        ///< one per inequality row
  Vector bound_lower;  ///< multipliers of x >= lb
  Vector bound_upper;  ///< multipliers of x <= ub
  /// True when no other minimizer exists (nondegenerate dual for LP,
  /// positive definite Hessian for QP).
  bool unique = false;
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

enum class PivotRule {
  /// Most negative reduced cost, falling back to Bland after a streak of
  /// degenerate pivots.
  DantzigWithBlandFallback,
  /// Smallest eligible index for entering and leaving variables.
  Bland,
};

struct SimplexOptions {
  PivotRule rule = PivotRule::DantzigWithBlandFallback;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-10;
  double pivot_tol = 1e-11;
  std::size_t degenerate_streak_for_bland = 25;
  std::size_t refactor_interval = 64;
  std::size_t max_iterations = 200000;
};

/// Bounded-variable revised simplex (two phases, explicit basis inverse).
/// Deterministic: identical input gives bit-identical output.
LpSolution solve_lp(const LpProblem& lp, const SimplexOptions& options = {});

/// LP dual objective -d^T mu + sum_j min(r_j lb_j, r_j ub_j) with
/// r = c + C^T mu. A lower bound on the LP optimum for every mu >= 0.
double lp_dual_objective(const LpProblem& lp, const Vector& row_duals);

/**
 * Dense convex QP
 *
 *   min  1/2 x^T Q x + q^T x
 *   s.t. C x <= d,  lb <= x <= ub
 */
struct QpProblem {
  Matrix hessian;  ///< Q, symmetric positive semidefinite
  LpProblem linear;

  /// Also rejects non-symmetric or indefinite Q.
  void validate() const;
};

/// Primal active-set method started from an LP vertex. Handles singular Q
/// through zero-curvature descent steps.
LpSolution solve_qp(const QpProblem& qp, const SimplexOptions& options = {});

/// Max-norm KKT residuals of a solution to the QP (Q may be zero).
struct KktResiduals {
  double primal = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
  double dual_sign = 0.0;  ///< most negative multiplier, reported as a positive number
};

KktResiduals kkt_residuals(const QpProblem& qp, const LpSolution& solution);

}  // namespace dualdec

#endif  // DUALDEC_LP_HPP_
