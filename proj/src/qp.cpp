#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dualdec/lp.hpp"

namespace dualdec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Orthonormal basis of {p : rows p = 0}; rows are assumed independent.
Matrix null_space(const Matrix& rows, Index n) {
  if (rows.rows() == 0) return Matrix::Identity(n, n);
  if (rows.rows() >= n) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(rows.transpose());
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - rows.rows());
}

Matrix gather_rows(const Matrix& g, const std::vector<Index>& which) {
  Matrix out(static_cast<Index>(which.size()), g.cols());
  for (std::size_t k = 0; k < which.size(); ++k) out.row(static_cast<Index>(k)) = g.row(which[k]);
  return out;
}

bool independent_of(const Matrix& current, const Eigen::RowVectorXd& candidate) {
  Matrix stacked(current.rows() + 1, candidate.size());
  stacked << current, candidate;
  Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
  qr.setThreshold(1e-10);
  return qr.rank() == stacked.rows();
}

}  // namespace

void QpProblem::validate() const {
  linear.validate();
  const Index n = linear.num_vars();
  require(hessian.rows() == n && hessian.cols() == n, "qp: Hessian must be n x n");
  require(hessian.allFinite(), "qp: non-finite Hessian");
  require((hessian - hessian.transpose()).cwiseAbs().maxCoeff() <= 1e-12 || n == 0,
          "qp: Hessian must be symmetric");
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian, Eigen::EigenvaluesOnly);
    require(eig.eigenvalues().minCoeff() >= -1e-9, "qp: Hessian must be positive semidefinite");
  }
}

LpSolution solve_qp(const QpProblem& qp, const SimplexOptions& options) {
  qp.validate();
  const LpProblem& lp = qp.linear;
  const Index n = lp.num_vars();
  const Index r = lp.rows.cols() == n ? lp.num_rows() : 0;
  const Index total = r + 2 * n;

  // Uniform system G x <= h: [C; -I; I] x <= [d; -lb; ub].
  Matrix g_rows = Matrix::Zero(total, n);
  Vector h(total);
  if (r > 0) {
    g_rows.topRows(r) = lp.rows;
    h.head(r) = lp.rhs;
  }
  g_rows.block(r, 0, n, n) = -Matrix::Identity(n, n);
  g_rows.block(r + n, 0, n, n) = Matrix::Identity(n, n);
  h.segment(r, n) = -lp.lower;
  h.segment(r + n, n) = lp.upper;

  LpSolution start = solve_lp(lp, options);
  if (!start.optimal()) return start;

  Vector x = start.x;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  std::vector<Index> working;
  Matrix working_rows(0, n);
  for (Index k = 0; k < total; ++k) {
    if (std::abs(g_rows.row(k).dot(x) - h(k)) > 1e-9 * scale) continue;
    if (!independent_of(working_rows, g_rows.row(k))) continue;
    working.push_back(k);
    working_rows = gather_rows(g_rows, working);
  }

  const double hessian_scale = std::max(1.0, qp.hessian.cwiseAbs().maxCoeff());
  const std::size_t max_iterations = 20 * static_cast<std::size_t>(total + n) + 100;
  Vector multipliers;
  std::size_t iterations = 0;
  while (true) {
    if (++iterations > max_iterations) throw SolverError("qp active-set iteration limit reached");
    const Vector gradient = qp.hessian * x + lp.cost;
    const Matrix z = null_space(working_rows, n);

    Vector step_direction = Vector::Zero(n);
    double max_step = 1.0;
    if (z.cols() > 0) {
      const Matrix reduced_hessian = z.transpose() * qp.hessian * z;
      const Vector reduced_gradient = z.transpose() * gradient;
      Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced_hessian);
      const double curvature_tol = 1e-10 * hessian_scale;
      Vector newton = Vector::Zero(z.cols());
      Vector flat = Vector::Zero(z.cols());
      for (Index k = 0; k < z.cols(); ++k) {
        const Vector u = eig.eigenvectors().col(k);
        const double component = u.dot(reduced_gradient);
        if (eig.eigenvalues()(k) > curvature_tol) {
          newton -= (component / eig.eigenvalues()(k)) * u;
        } else {
          flat += component * u;
        }
      }
      if (flat.norm() > 1e-12 * std::max(1.0, gradient.norm())) {
        step_direction = -(z * flat);
        max_step = kInf;
      } else {
        step_direction = z * newton;
      }
    }

    if (step_direction.cwiseAbs().maxCoeff() <= 1e-12 || n == 0) {
      if (working.empty()) {
        multipliers = Vector();
        break;
      }
      Eigen::ColPivHouseholderQR<Matrix> qr(working_rows.transpose());
      multipliers = qr.solve(-gradient);
      Index drop = -1;
      double most_negative = -1e-10;
      for (Index k = 0; k < multipliers.size(); ++k) {
        if (multipliers(k) < most_negative) {
          most_negative = multipliers(k);
          drop = k;
        }
      }
      if (drop < 0) break;
      working.erase(working.begin() + drop);
      working_rows = gather_rows(g_rows, working);
      continue;
    }

    double step = kInf;
    Index blocking = -1;
    for (Index k = 0; k < total; ++k) {
      if (std::find(working.begin(), working.end(), k) != working.end()) continue;
      const double rate = g_rows.row(k).dot(step_direction);
      if (rate <= 1e-12) continue;
      const double limit = std::max(0.0, h(k) - g_rows.row(k).dot(x)) / rate;
      if (limit < step) {
        step = limit;
        blocking = k;
      }
    }
    if (max_step < step) {
      step = max_step;
      blocking = -1;
    }
    if (!std::isfinite(step)) {
      LpSolution out;
      out.status = LpStatus::Unbounded;
      out.x = x;
      return out;
    }
    x += step * step_direction;
    if (blocking >= 0) {
      working.push_back(blocking);
      working_rows = gather_rows(g_rows, working);
    }
  }

  LpSolution out;
  out.status = LpStatus::Optimal;
  out.iterations = iterations + start.iterations;
  out.x = x.cwiseMax(lp.lower).cwiseMin(lp.upper);
  out.objective = 0.5 * out.x.dot(qp.hessian * out.x) + lp.cost.dot(out.x);
  out.duals = Vector::Zero(r);
  out.bound_lower = Vector::Zero(n);
  out.bound_upper = Vector::Zero(n);
  std::vector<Index> strongly_active;
  for (std::size_t k = 0; k < working.size(); ++k) {
    const Index row = working[k];
    const double mu = std::max(0.0, multipliers(static_cast<Index>(k)));
    if (row < r) {
      out.duals(row) = mu;
    } else if (row < r + n) {
      out.bound_lower(row - r) = mu;
    } else {
      out.bound_upper(row - r - n) = mu;
    }
    if (mu > 1e-9) strongly_active.push_back(row);
  }
  const Matrix z = null_space(gather_rows(g_rows, strongly_active), n);
  if (z.cols() == 0) {
    out.unique = true;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(z.transpose() * qp.hessian * z,
                                              Eigen::EigenvaluesOnly);
    out.unique = eig.eigenvalues().minCoeff() > 1e-9;
  }
  return out;
}

KktResiduals kkt_residuals(const QpProblem& qp, const LpSolution& solution) {
  const LpProblem& lp = qp.linear;
  const Vector& x = solution.x;
  KktResiduals res;
  Vector stationarity = qp.hessian * x + lp.cost - solution.bound_lower + solution.bound_upper;
  if (lp.num_rows() > 0) {
    const Vector slack = lp.rhs - lp.rows * x;
    stationarity += lp.rows.transpose() * solution.duals;
    res.primal = std::max(res.primal, (-slack).maxCoeff());
    res.complementarity =
        std::max(res.complementarity, solution.duals.cwiseProduct(slack).cwiseAbs().maxCoeff());
    res.dual_sign = std::max(res.dual_sign, -solution.duals.minCoeff());
  }
  if (x.size() > 0) {
    res.primal = std::max({res.primal, (lp.lower - x).maxCoeff(), (x - lp.upper).maxCoeff()});
    res.stationarity = stationarity.cwiseAbs().maxCoeff();
    res.complementarity = std::max(
        {res.complementarity,
         solution.bound_lower.cwiseProduct(x - lp.lower).cwiseAbs().maxCoeff(),
         solution.bound_upper.cwiseProduct(lp.upper - x).cwiseAbs().maxCoeff()});
    res.dual_sign = std::max({res.dual_sign, -solution.bound_lower.minCoeff(),
                              -solution.bound_upper.minCoeff()});
  }
  res.primal = std::max(res.primal, 0.0);
  return res;
}

}  // namespace dualdec
