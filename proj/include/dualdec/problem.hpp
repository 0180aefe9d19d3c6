#ifndef DUALDEC_PROBLEM_HPP_
#define DUALDEC_PROBLEM_HPP_

#include <optional>
#include <vector>

#include "dualdec/lp.hpp"
#include "dualdec/types.hpp"

namespace dualdec {

/// f_i(x) = q^T x + 1/2 x^T Q x with Q symmetric positive semidefinite.
class ObjectiveForm {
 public:
  enum class Kind { Linear, Quadratic };

  static ObjectiveForm linear(Vector q);
  /// Throws ValidationError if Q is not symmetric (1e-12) or not PSD (-1e-9).
  static ObjectiveForm quadratic(Vector q, Matrix Q);

  Kind kind() const { return kind_; }
  bool is_linear() const { return kind_ == Kind::Linear; }
  Index dim() const { return linear_.size(); }
  const Vector& linear_part() const { return linear_; }
  /// Zero matrix for linear objectives.
  const Matrix& quadratic_part() const { return quadratic_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

 private:
  ObjectiveForm(Kind kind, Vector q, Matrix Q);

  Kind kind_;
  Vector linear_;
  Matrix quadratic_;
};

/// g_i(x) = A x - b, mapping R^{n_i} to R^p.
struct CouplingMap {
  Matrix A;  ///< p x n_i
  Vector b;  ///< agent's share of the coupling right-hand side

  Index dim() const { return b.size(); }
};

/// X_i = { x : C x <= d, lb <= x <= ub } with finite bounds.
struct Polytope {
  Matrix C;
  Vector d;
  Vector lower;
  Vector upper;

  Index dim() const { return lower.size(); }
  bool contains(const Vector& x, double tol = 1e-8) const;
  /// Largest constraint violation (0 when x is inside).
  double violation(const Vector& x) const;
};

struct AgentProblem {
  AgentProblem(ObjectiveForm objective, CouplingMap coupling, Polytope feasible);

  ObjectiveForm objective;
  CouplingMap coupling;
  Polytope feasible;

  Index dim() const { return objective.dim(); }
  Index coupling_dim() const { return coupling.dim(); }
};

/// Separable program: min sum_i f_i(x_i) s.t. sum_i g_i(x_i) <= 0, x_i in X_i.
class CoupledProblem {
 public:
  CoupledProblem(std::vector<AgentProblem> agents, Index coupling_dim);

  std::size_t num_agents() const { return agents_.size(); }
  Index coupling_dim() const { return p_; }
  Index total_dim() const;
  const AgentProblem& agent(std::size_t i) const { return agents_.at(i); }
  const std::vector<AgentProblem>& agents() const { return agents_; }

  /// Offsets of each agent's block inside the stacked vector x = [x_1; ...; x_m].
  std::vector<Index> offsets() const;
  std::vector<Vector> split(const Vector& stacked) const;
  Vector stack(const std::vector<Vector>& blocks) const;

  double objective(const std::vector<Vector>& x) const;
  /// sum_i g_i(x_i)
  Vector coupling(const std::vector<Vector>& x) const;

 private:
  std::vector<AgentProblem> agents_;
  Index p_;
};

double eval_objective(const AgentProblem& agent, const Vector& x);
Vector eval_coupling(const AgentProblem& agent, const Vector& x);
/// f_i(x) + lambda^T g_i(x); rejects negative lambda.
double eval_local_lagrangian(const AgentProblem& agent, const Vector& x, const Vector& lambda);

struct DualValue {
  double value = 0.0;
  Vector minimizer;
};

/// phi_i(lambda) = min over X_i of the local Lagrangian, with its minimizer.
/// Throws InfeasibleError if X_i is empty.
DualValue eval_dual_function(const AgentProblem& agent, const Vector& lambda);

/// The local program min f_i(x) + lambda^T (A x - b) over X_i, written as an
/// LP/QP (the constant -lambda^T b is dropped).
QpProblem local_program(const AgentProblem& agent, const Vector& lambda);

struct SlaterReport {
  bool holds = false;
  double margin = 0.0;
  std::optional<Vector> witness;  ///< stacked x when holds
};

inline constexpr double kSlaterTolerance = 1e-7;

/// Max-margin feasibility program: maximize s such that sum_i g_i(x_i) <= 0
/// (all coupling rows are affine), C_i x_i <= d_i - s ||row||, and every
/// non-degenerate box coordinate sits at least s inside its bounds.
/// holds iff the optimal margin exceeds kSlaterTolerance.
///
/// A `hint` whose own margin already exceeds the tolerance is returned as the
/// witness without solving; `margin` is then the hint's margin, a lower bound
/// on the optimum.
SlaterReport check_slater(const CoupledProblem& problem, const Vector* hint = nullptr);

/// Margin of a stacked candidate under the certificate above: -infinity when
/// a coupling row is violated by more than 1e-12, otherwise the smallest
/// normalized local slack and box distance.
double slater_margin(const CoupledProblem& problem, const Vector& stacked);

/// Certified over-approximation of max_i max_{x in X_i} ||g_i(x)||_2 built
/// from per-row LP maxima of |A_k x - b_k|.
double compute_g_bound(const CoupledProblem& problem);

}  // namespace dualdec

#endif  // DUALDEC_PROBLEM_HPP_
