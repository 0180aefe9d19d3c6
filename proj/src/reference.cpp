#include <cmath>
#include <limits>

#include "dualdec/reference.hpp"

namespace dualdec {

Vector local_argmin(const AgentProblem& agent, const Vector& lambda_hat) {
  const QpProblem qp = local_program(agent, lambda_hat);
  const LpSolution sol = agent.objective.is_linear() ? solve_lp(qp.linear) : solve_qp(qp);
  if (sol.status == LpStatus::Infeasible) throw InfeasibleError("local feasible set is empty");
  if (!sol.optimal()) throw SolverError("local program is unbounded");
  return sol.x;
}

CentralizedReference solve_centralized(const CoupledProblem& problem) {
  const Index n = problem.total_dim();
  const Index p = problem.coupling_dim();
  const auto offsets = problem.offsets();
  Index local_rows = 0;
  bool quadratic = false;
  for (const auto& a : problem.agents()) {
    local_rows += a.feasible.C.rows();
    quadratic |= !a.objective.is_linear();
  }

  QpProblem qp;
  qp.hessian = Matrix::Zero(n, n);
  LpProblem& lp = qp.linear;
  lp.cost = Vector::Zero(n);
  lp.lower = Vector::Zero(n);
  lp.upper = Vector::Zero(n);
  lp.rows = Matrix::Zero(local_rows + p, n);
  lp.rhs = Vector::Zero(local_rows + p);

  Index row = 0;
  for (std::size_t i = 0; i < problem.num_agents(); ++i) {
    const auto& a = problem.agent(i);
    const Index off = offsets[i];
    const Index ni = a.dim();
    lp.cost.segment(off, ni) = a.objective.linear_part();
    qp.hessian.block(off, off, ni, ni) = a.objective.quadratic_part();
    lp.lower.segment(off, ni) = a.feasible.lower;
    lp.upper.segment(off, ni) = a.feasible.upper;
    const Index ri = a.feasible.C.rows();
    if (ri > 0) {
      lp.rows.block(row, off, ri, ni) = a.feasible.C;
      lp.rhs.segment(row, ri) = a.feasible.d;
    }
    row += ri;
    if (p > 0) {
      lp.rows.block(local_rows, off, p, ni) = a.coupling.A;
      lp.rhs.tail(p) += a.coupling.b;
    }
  }

  const LpSolution sol = quadratic ? solve_qp(qp) : solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) throw InfeasibleError("coupled program is infeasible");
  if (!sol.optimal()) throw SolverError("coupled program is unbounded");

  CentralizedReference ref;
  ref.x_star = sol.x;
  ref.lambda_star = p > 0 ? Vector(sol.duals.tail(p).cwiseMax(0.0)) : Vector(0);
  ref.f_star = sol.objective;
  ref.unique = sol.unique;
  return ref;
}

GridReference brute_force_reference(const CoupledProblem& problem, std::size_t resolution) {
  const Index n = problem.total_dim();
  require(static_cast<std::size_t>(n) <= kMaxGridDim, "brute force: instance too large");
  require(resolution >= 2, "brute force: need at least two points per coordinate");
  double points = 1.0;
  for (Index j = 0; j < n; ++j) points *= static_cast<double>(resolution);
  require(points <= static_cast<double>(kMaxGridPoints), "brute force: grid too large");

  Vector lower(n);
  Vector upper(n);
  const auto offsets = problem.offsets();
  for (std::size_t i = 0; i < problem.num_agents(); ++i) {
    const auto& a = problem.agent(i);
    lower.segment(offsets[i], a.dim()) = a.feasible.lower;
    upper.segment(offsets[i], a.dim()) = a.feasible.upper;
  }
  const Vector spacing = (upper - lower) / static_cast<double>(resolution - 1);

  GridReference out;
  out.points = static_cast<std::size_t>(points);
  out.spacing = n > 0 ? spacing.maxCoeff() : 0.0;
  out.f = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> counter(static_cast<std::size_t>(n), 0);
  Vector x = lower;
  const double tol = 1e-12;
  for (std::size_t visited = 0; visited < out.points; ++visited) {
    const auto blocks = problem.split(x);
    bool ok = true;
    for (std::size_t i = 0; i < blocks.size() && ok; ++i) {
      ok = problem.agent(i).feasible.contains(blocks[i], tol);
    }
    if (ok && problem.coupling_dim() > 0) ok = problem.coupling(blocks).maxCoeff() <= tol;
    if (ok) {
      const double f = problem.objective(blocks);
      if (f < out.f) {
        out.f = f;
        out.x = x;
        out.feasible = true;
      }
    }
    // Odometer increment.
    for (Index j = 0; j < n; ++j) {
      auto& c = counter[static_cast<std::size_t>(j)];
      if (++c < resolution) {
        x(j) = c + 1 == resolution ? upper(j) : lower(j) + static_cast<double>(c) * spacing(j);
        break;
      }
      c = 0;
      x(j) = lower(j);
    }
  }
  if (!out.feasible) out.f = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace dualdec
