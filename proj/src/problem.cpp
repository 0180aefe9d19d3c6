#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dualdec/problem.hpp"

namespace dualdec {

ObjectiveForm::ObjectiveForm(Kind kind, Vector q, Matrix Q)
    : kind_(kind), linear_(std::move(q)), quadratic_(std::move(Q)) {}

ObjectiveForm ObjectiveForm::linear(Vector q) {
  require(q.allFinite(), "objective: non-finite linear part");
  const Index n = q.size();
  return ObjectiveForm(Kind::Linear, std::move(q), Matrix::Zero(n, n));
}

ObjectiveForm ObjectiveForm::quadratic(Vector q, Matrix Q) {
  const Index n = q.size();
  require(Q.rows() == n && Q.cols() == n, "objective: Q must be n x n");
  require(q.allFinite() && Q.allFinite(), "objective: non-finite data");
  require(n == 0 || (Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
          "objective: Q must be symmetric");
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
    require(eig.eigenvalues().minCoeff() >= -1e-9, "objective: Q must be positive semidefinite");
  }
  return ObjectiveForm(Kind::Quadratic, std::move(q), std::move(Q));
}

double ObjectiveForm::value(const Vector& x) const {
  require(x.size() == dim(), "objective: dimension mismatch");
  double v = linear_.dot(x);
  if (kind_ == Kind::Quadratic) v += 0.5 * x.dot(quadratic_ * x);
  return v;
}

Vector ObjectiveForm::gradient(const Vector& x) const {
  require(x.size() == dim(), "objective: dimension mismatch");
  if (kind_ == Kind::Linear) return linear_;
  return linear_ + quadratic_ * x;
}

double Polytope::violation(const Vector& x) const {
  double worst = 0.0;
  if (C.rows() > 0) worst = std::max(worst, (C * x - d).maxCoeff());
  if (x.size() > 0) {
    worst = std::max({worst, (lower - x).maxCoeff(), (x - upper).maxCoeff()});
  }
  return worst;
}

bool Polytope::contains(const Vector& x, double tol) const {
  return x.size() == dim() && violation(x) <= tol;
}

AgentProblem::AgentProblem(ObjectiveForm objective_in, CouplingMap coupling_in,
                           Polytope feasible_in)
    : objective(std::move(objective_in)),
      coupling(std::move(coupling_in)),
      feasible(std::move(feasible_in)) {
  const Index n = objective.dim();
  require(coupling.A.rows() == coupling.b.size(), "agent: coupling A rows must match b");
  require(coupling.A.cols() == n || coupling.A.rows() == 0, "agent: coupling A has wrong width");
  if (coupling.A.cols() != n) coupling.A = Matrix::Zero(0, n);
  require(coupling.A.allFinite() && coupling.b.allFinite(), "agent: non-finite coupling data");
  require(feasible.lower.size() == n && feasible.upper.size() == n,
          "agent: bound vectors must have length n");
  require(feasible.C.rows() == feasible.d.size(), "agent: polytope C rows must match d");
  require(feasible.C.cols() == n || feasible.C.rows() == 0, "agent: polytope C has wrong width");
  if (feasible.C.cols() != n) feasible.C = Matrix::Zero(0, n);
  require(feasible.lower.allFinite() && feasible.upper.allFinite(),
          "agent: polytope must be bounded (finite box)");
  require(feasible.C.allFinite() && feasible.d.allFinite(), "agent: non-finite polytope data");
  for (Index j = 0; j < n; ++j) {
    require(feasible.lower(j) <= feasible.upper(j), "agent: lower bound exceeds upper bound");
  }
}

CoupledProblem::CoupledProblem(std::vector<AgentProblem> agents, Index coupling_dim)
    : agents_(std::move(agents)), p_(coupling_dim) {
  require(!agents_.empty(), "problem: at least one agent required");
  require(p_ >= 0, "problem: negative coupling dimension");
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    require(agents_[i].coupling_dim() == p_,
            "problem: agent " + std::to_string(i) + " has coupling dimension " +
                std::to_string(agents_[i].coupling_dim()) + ", expected " + std::to_string(p_));
  }
}

Index CoupledProblem::total_dim() const {
  Index n = 0;
  for (const auto& a : agents_) n += a.dim();
  return n;
}

std::vector<Index> CoupledProblem::offsets() const {
  std::vector<Index> out;
  out.reserve(agents_.size());
  Index offset = 0;
  for (const auto& a : agents_) {
    out.push_back(offset);
    offset += a.dim();
  }
  return out;
}

std::vector<Vector> CoupledProblem::split(const Vector& stacked) const {
  require(stacked.size() == total_dim(), "problem: stacked vector has wrong length");
  std::vector<Vector> out;
  Index offset = 0;
  for (const auto& a : agents_) {
    out.emplace_back(stacked.segment(offset, a.dim()));
    offset += a.dim();
  }
  return out;
}

Vector CoupledProblem::stack(const std::vector<Vector>& blocks) const {
  require(blocks.size() == agents_.size(), "problem: wrong number of blocks");
  Vector out(total_dim());
  Index offset = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    require(blocks[i].size() == agents_[i].dim(), "problem: block has wrong length");
    out.segment(offset, blocks[i].size()) = blocks[i];
    offset += blocks[i].size();
  }
  return out;
}

double CoupledProblem::objective(const std::vector<Vector>& x) const {
  require(x.size() == agents_.size(), "problem: wrong number of blocks");
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += eval_objective(agents_[i], x[i]);
  return total;
}

Vector CoupledProblem::coupling(const std::vector<Vector>& x) const {
  require(x.size() == agents_.size(), "problem: wrong number of blocks");
  Vector total = Vector::Zero(p_);
  for (std::size_t i = 0; i < x.size(); ++i) total += eval_coupling(agents_[i], x[i]);
  return total;
}

double eval_objective(const AgentProblem& agent, const Vector& x) {
  return agent.objective.value(x);
}

Vector eval_coupling(const AgentProblem& agent, const Vector& x) {
  require(x.size() == agent.dim(), "coupling: dimension mismatch");
  if (agent.coupling_dim() == 0) return Vector::Zero(0);
  return agent.coupling.A * x - agent.coupling.b;
}

namespace {

void require_multiplier(const AgentProblem& agent, const Vector& lambda) {
  require(lambda.size() == agent.coupling_dim(), "lagrangian: multiplier has wrong length");
  require(lambda.size() == 0 || lambda.minCoeff() >= 0.0,
          "lagrangian: multipliers must be nonnegative");
}

}  // namespace

double eval_local_lagrangian(const AgentProblem& agent, const Vector& x, const Vector& lambda) {
  require_multiplier(agent, lambda);
  double value = eval_objective(agent, x);
  if (lambda.size() > 0) value += lambda.dot(eval_coupling(agent, x));
  return value;
}

QpProblem local_program(const AgentProblem& agent, const Vector& lambda) {
  require_multiplier(agent, lambda);
  QpProblem qp;
  qp.hessian = agent.objective.quadratic_part();
  qp.linear.cost = agent.objective.linear_part();
  if (lambda.size() > 0) qp.linear.cost += agent.coupling.A.transpose() * lambda;
  qp.linear.rows = agent.feasible.C;
  qp.linear.rhs = agent.feasible.d;
  qp.linear.lower = agent.feasible.lower;
  qp.linear.upper = agent.feasible.upper;
  return qp;
}

DualValue eval_dual_function(const AgentProblem& agent, const Vector& lambda) {
  const QpProblem qp = local_program(agent, lambda);
  const LpSolution sol = agent.objective.is_linear() ? solve_lp(qp.linear) : solve_qp(qp);
  if (sol.status == LpStatus::Infeasible) throw InfeasibleError("local feasible set is empty");
  if (!sol.optimal()) throw SolverError("local program is unbounded");
  DualValue out;
  out.minimizer = sol.x;
  out.value = eval_local_lagrangian(agent, sol.x, lambda);
  return out;
}

double slater_margin(const CoupledProblem& problem, const Vector& stacked) {
  require(stacked.size() == problem.total_dim(), "slater margin: dimension mismatch");
  const auto x = problem.split(stacked);
  if (problem.coupling_dim() > 0 && problem.coupling(x).maxCoeff() > 1e-12) {
    return -std::numeric_limits<double>::infinity();
  }
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < problem.num_agents(); ++i) {
    const Polytope& X = problem.agent(i).feasible;
    for (Index k = 0; k < X.C.rows(); ++k) {
      const double norm = X.C.row(k).norm();
      if (norm > 0.0) margin = std::min(margin, (X.d(k) - X.C.row(k).dot(x[i])) / norm);
    }
    for (Index j = 0; j < X.dim(); ++j) {
      if (X.upper(j) - X.lower(j) <= 0.0) continue;
      margin = std::min({margin, x[i](j) - X.lower(j), X.upper(j) - x[i](j)});
    }
  }
  return margin;
}

SlaterReport check_slater(const CoupledProblem& problem, const Vector* hint) {
  SlaterReport report;
  const Index p = problem.coupling_dim();
  if (p == 0) {
    report.holds = true;
    return report;
  }
  if (hint) {
    const double margin = slater_margin(problem, *hint);
    if (margin > kSlaterTolerance) {
      report.holds = true;
      report.margin = margin;
      report.witness = *hint;
      return report;
    }
  }
  const Index n = problem.total_dim();
  const auto offsets = problem.offsets();

  Index local_rows = 0;
  Index box_rows = 0;
  double widest = 0.0;
  for (const auto& a : problem.agents()) {
    local_rows += a.feasible.C.rows();
    for (Index j = 0; j < a.dim(); ++j) {
      const double width = a.feasible.upper(j) - a.feasible.lower(j);
      if (width > 0.0) box_rows += 2;
      widest = std::max(widest, width);
    }
  }

  // Variables: [x (n) | s]; minimize -s.
  LpProblem lp;
  lp.cost = Vector::Zero(n + 1);
  lp.cost(n) = -1.0;
  lp.lower = Vector::Zero(n + 1);
  lp.upper = Vector::Zero(n + 1);
  lp.rows = Matrix::Zero(p + local_rows + box_rows, n + 1);
  lp.rhs = Vector::Zero(lp.rows.rows());
  lp.upper(n) = std::max(1.0, widest);

  Index row = p;
  for (std::size_t i = 0; i < problem.num_agents(); ++i) {
    const auto& a = problem.agent(i);
    const Index off = offsets[i];
    lp.lower.segment(off, a.dim()) = a.feasible.lower;
    lp.upper.segment(off, a.dim()) = a.feasible.upper;
    lp.rows.block(0, off, p, a.dim()) = a.coupling.A;
    lp.rhs.head(p) += a.coupling.b;
    for (Index k = 0; k < a.feasible.C.rows(); ++k, ++row) {
      lp.rows.block(row, off, 1, a.dim()) = a.feasible.C.row(k);
      lp.rows(row, n) = a.feasible.C.row(k).norm();
      lp.rhs(row) = a.feasible.d(k);
    }
    for (Index j = 0; j < a.dim(); ++j) {
      if (a.feasible.upper(j) - a.feasible.lower(j) <= 0.0) continue;
      lp.rows(row, off + j) = -1.0;
      lp.rows(row, n) = 1.0;
      lp.rhs(row++) = -a.feasible.lower(j);
      lp.rows(row, off + j) = 1.0;
      lp.rows(row, n) = 1.0;
      lp.rhs(row++) = a.feasible.upper(j);
    }
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) return report;
  if (!sol.optimal()) throw SolverError("slater program did not solve");
  report.margin = sol.x(n);
  report.holds = report.margin > kSlaterTolerance;
  if (report.holds) report.witness = sol.x.head(n);
  return report;
}

double compute_g_bound(const CoupledProblem& problem) {
  double bound = 0.0;
  for (const auto& a : problem.agents()) {
    require(a.feasible.lower.allFinite() && a.feasible.upper.allFinite(),
            "g bound: polytope is unbounded");
    LpProblem lp;
    lp.rows = a.feasible.C;
    lp.rhs = a.feasible.d;
    lp.lower = a.feasible.lower;
    lp.upper = a.feasible.upper;
    double squared = 0.0;
    for (Index k = 0; k < a.coupling_dim(); ++k) {
      const Vector row = a.coupling.A.row(k).transpose();
      lp.cost = row;
      const LpSolution low = solve_lp(lp);
      lp.cost = -row;
      const LpSolution high = solve_lp(lp);
      if (!low.optimal() || !high.optimal()) {
        throw InfeasibleError("g bound: local feasible set is empty");
      }
      const double b = a.coupling.b(k);
      const double worst = std::max(std::abs(low.objective - b), std::abs(-high.objective - b));
      squared += worst * worst;
    }
    bound = std::max(bound, std::sqrt(squared));
  }
  return bound;
}

}  // namespace dualdec
