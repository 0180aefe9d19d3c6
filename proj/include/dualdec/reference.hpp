#ifndef DUALDEC_REFERENCE_HPP_
#define DUALDEC_REFERENCE_HPP_

#include <cstddef>

#include "dualdec/problem.hpp"

namespace dualdec {

/// Step-7 primal update: a minimizer of f_i(x) + lambda_hat^T g_i(x) over X_i.
/// Ties resolve to the vertex reached first by the simplex from the lower
/// bounds, so repeated calls give identical results.
Vector local_argmin(const AgentProblem& agent, const Vector& lambda_hat);

/// Optimal primal-dual pair of the coupled program.
struct CentralizedReference {
  Vector x_star;       ///< stacked, length sum_i n_i
  Vector lambda_star;  ///< length p
  double f_star = 0.0;
  /// Solver certified that the primal minimizer is unique.
  bool unique = false;
};

/// Solves the stacked LP/QP; lambda* are the multipliers of the p coupling rows.
/// Throws InfeasibleError / SolverError on failure.
CentralizedReference solve_centralized(const CoupledProblem& problem);

struct GridReference {
  bool feasible = false;
  Vector x;
  double f = 0.0;
  std::size_t points = 0;
  double spacing = 0.0;  ///< largest per-coordinate grid step
};

inline constexpr std::size_t kMaxGridDim = 8;
inline constexpr std::size_t kMaxGridPoints = 1000000;

/// Exhaustive search over a uniform lattice with `resolution` points per
/// coordinate spanning each box. Throws ValidationError when the total
/// dimension exceeds kMaxGridDim or the lattice exceeds kMaxGridPoints.
GridReference brute_force_reference(const CoupledProblem& problem, std::size_t resolution);

}  // namespace dualdec

#endif  // DUALDEC_REFERENCE_HPP_
