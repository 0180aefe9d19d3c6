#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dualdec/lp.hpp"

namespace dualdec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bounded-variable revised simplex over the standard form
//
//   C x + s + diag(sigma) a = d,   lb <= x <= ub,  s >= 0,  a >= 0
//
// Variables are laid out as [x (n) | s (r) | a (r)]. Artificial a_i is only
// given room in phase 1, and only for rows violated at x = lb.
class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& lp, const SimplexOptions& options)
      : lp_(lp),
        opts_(options),
        n_(lp.num_vars()),
        r_(lp.num_rows()),
        total_(n_ + 2 * r_),
        lo_(Vector::Zero(total_)),
        hi_(Vector::Zero(total_)),
        x_(Vector::Zero(total_)),
        at_upper_(static_cast<std::size_t>(total_), false),
        sigma_(Vector::Ones(r_)),
        basis_(static_cast<std::size_t>(r_)),
        position_(static_cast<std::size_t>(total_), -1) {
    lo_.head(n_) = lp.lower;
    hi_.head(n_) = lp.upper;
    x_.head(n_) = lp.lower;
    for (Index i = 0; i < r_; ++i) hi_(n_ + i) = kInf;

    const Vector residual = r_ > 0 ? Vector(lp.rhs - lp.rows * lp.lower) : Vector();
    for (Index i = 0; i < r_; ++i) {
      const Index slack = n_ + i;
      const Index artificial = n_ + r_ + i;
      if (residual(i) >= 0.0) {
        basis_[static_cast<std::size_t>(i)] = slack;
        x_(slack) = residual(i);
      } else {
        sigma_(i) = -1.0;
        hi_(artificial) = kInf;
        basis_[static_cast<std::size_t>(i)] = artificial;
        x_(artificial) = -residual(i);
      }
      position_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = i;
    }
    // Initial basis is diag(+-1); its inverse is itself.
    binv_ = sigma_.asDiagonal();
    refactor_interval_ = std::max<std::size_t>(options.refactor_interval,
                                               static_cast<std::size_t>(r_));
  }

  LpSolution solve() {
    LpSolution out;
    bool needs_phase_one = false;
    for (Index i = 0; i < r_; ++i) needs_phase_one |= sigma_(i) < 0.0;

    if (needs_phase_one) {
      Vector phase_one_cost = Vector::Zero(total_);
      for (Index i = 0; i < r_; ++i) {
        if (sigma_(i) < 0.0) phase_one_cost(n_ + r_ + i) = 1.0;
      }
      const LpStatus status = iterate(phase_one_cost);
      if (status != LpStatus::Optimal) throw SolverError("simplex phase 1 did not terminate");
      const double scale = std::max(1.0, lp_.rhs.cwiseAbs().maxCoeff());
      if (phase_one_cost.dot(x_) > opts_.feasibility_tol * scale) {
        out.status = LpStatus::Infeasible;
        out.x = x_.head(n_);
        out.iterations = iterations_;
        return out;
      }
    }
    for (Index i = 0; i < r_; ++i) {
      const Index artificial = n_ + r_ + i;
      hi_(artificial) = 0.0;
      if (position_[static_cast<std::size_t>(artificial)] < 0) x_(artificial) = 0.0;
    }

    Vector cost = Vector::Zero(total_);
    cost.head(n_) = lp_.cost;
    const LpStatus status = iterate(cost);
    out.status = status;
    out.iterations = iterations_;
    out.x = x_.head(n_);
    if (status != LpStatus::Optimal) return out;

    refactor();
    out.x = x_.head(n_);
    // Snap structurals into their boxes; basic values can carry roundoff.
    for (Index j = 0; j < n_; ++j) out.x(j) = std::clamp(out.x(j), lo_(j), hi_(j));
    out.objective = lp_.cost.dot(out.x);

    const Vector y = prices(cost);
    out.duals = -y;
    for (Index i = 0; i < r_; ++i) {
      if (out.duals(i) < 0.0 && out.duals(i) > -1e-10) out.duals(i) = 0.0;
    }
    const Vector reduced = r_ > 0 ? Vector(lp_.cost + lp_.rows.transpose() * out.duals)
                                  : Vector(lp_.cost);
    out.bound_lower = Vector::Zero(n_);
    out.bound_upper = Vector::Zero(n_);
    bool dual_nondegenerate = true;
    for (Index j = 0; j < total_; ++j) {
      if (position_[static_cast<std::size_t>(j)] >= 0) continue;
      if (hi_(j) - lo_(j) <= 0.0) continue;
      if (std::abs(reduced_cost(cost, y, j)) <= 1e-9) dual_nondegenerate = false;
    }
    for (Index j = 0; j < n_; ++j) {
      if (position_[static_cast<std::size_t>(j)] >= 0) continue;
      if (reduced(j) > 0.0) {
        out.bound_lower(j) = reduced(j);
      } else {
        out.bound_upper(j) = -reduced(j);
      }
    }
    out.unique = dual_nondegenerate;
    return out;
  }

 private:
  void column(Index j, Vector& out) const {
    if (j < n_) {
      out = lp_.rows.col(j);
      return;
    }
    out.setZero(r_);
    if (j < n_ + r_) {
      out(j - n_) = 1.0;
    } else {
      out(j - n_ - r_) = sigma_(j - n_ - r_);
    }
  }

  double column_dot(const Vector& y, Index j) const {
    if (j < n_) return lp_.rows.col(j).dot(y);
    if (j < n_ + r_) return y(j - n_);
    return sigma_(j - n_ - r_) * y(j - n_ - r_);
  }

  Vector prices(const Vector& cost) const {
    Vector cb(r_);
    for (Index i = 0; i < r_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
    return binv_.transpose() * cb;
  }

  double reduced_cost(const Vector& cost, const Vector& y, Index j) const {
    return cost(j) - column_dot(y, j);
  }

  void refactor() {
    pivots_since_refactor_ = 0;
    if (r_ == 0) return;
    Matrix basis_matrix(r_, r_);
    Vector col;
    for (Index i = 0; i < r_; ++i) {
      column(basis_[static_cast<std::size_t>(i)], col);
      basis_matrix.col(i) = col;
    }
    Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    binv_ = lu.inverse();
    if (!binv_.allFinite()) throw SolverError("simplex basis became singular");

    Vector effective = lp_.rhs;
    for (Index j = 0; j < total_; ++j) {
      if (position_[static_cast<std::size_t>(j)] >= 0 || x_(j) == 0.0) continue;
      column(j, col);
      effective -= col * x_(j);
    }
    const Vector xb = binv_ * effective;
    for (Index i = 0; i < r_; ++i) x_(basis_[static_cast<std::size_t>(i)]) = xb(i);
  }

  LpStatus iterate(const Vector& cost) {
    Vector y;
    Vector direction;
    Vector entering_column;
    std::size_t degenerate_streak = 0;

    while (true) {
      if (++iterations_ > opts_.max_iterations) {
        throw SolverError("simplex iteration limit reached");
      }
      y = prices(cost);
      const bool use_bland = opts_.rule == PivotRule::Bland ||
                             degenerate_streak >= opts_.degenerate_streak_for_bland;

      Index entering = -1;
      double best_score = 0.0;
      double entering_sign = 0.0;
      for (Index j = 0; j < total_; ++j) {
        if (position_[static_cast<std::size_t>(j)] >= 0) continue;
        if (hi_(j) - lo_(j) <= 0.0) continue;
        const double d = reduced_cost(cost, y, j);
        const bool upper = at_upper_[static_cast<std::size_t>(j)];
        double score = 0.0;
        if (!upper && d < -opts_.optimality_tol) score = -d;
        if (upper && d > opts_.optimality_tol) score = d;
        if (score <= 0.0) continue;
        if (score > best_score) {
          best_score = score;
          entering = j;
          entering_sign = upper ? -1.0 : 1.0;
        }
        if (use_bland) break;
      }
      if (entering < 0) return LpStatus::Optimal;

      column(entering, entering_column);
      direction = binv_ * entering_column;

      // Entering moves by entering_sign * t; basic i moves by -entering_sign * t * w_i.
      double step = hi_(entering) - lo_(entering);
      Index leaving_position = -1;
      bool leaving_to_upper = false;
      double leaving_pivot = 0.0;
      for (Index i = 0; i < r_; ++i) {
        const double rate = entering_sign * direction(i);
        const Index var = basis_[static_cast<std::size_t>(i)];
        double limit = kInf;
        bool to_upper = false;
        if (rate > opts_.pivot_tol) {
          limit = std::max(0.0, (x_(var) - lo_(var)) / rate);
        } else if (rate < -opts_.pivot_tol && std::isfinite(hi_(var))) {
          limit = std::max(0.0, (hi_(var) - x_(var)) / -rate);
          to_upper = true;
        } else {
          continue;
        }
        bool take = false;
        if (limit < step - 1e-12) {
          take = true;
        } else if (limit <= step + 1e-12 && leaving_position >= 0) {
          const Index current = basis_[static_cast<std::size_t>(leaving_position)];
          take = use_bland ? var < current : std::abs(rate) > std::abs(leaving_pivot);
        }
        if (take) {
          step = limit;
          leaving_position = i;
          leaving_to_upper = to_upper;
          leaving_pivot = rate;
        }
      }
      if (!std::isfinite(step)) return LpStatus::Unbounded;

      degenerate_streak = step <= 1e-12 ? degenerate_streak + 1 : 0;

      x_(entering) += entering_sign * step;
      for (Index i = 0; i < r_; ++i) {
        x_(basis_[static_cast<std::size_t>(i)]) -= entering_sign * step * direction(i);
      }

      if (leaving_position < 0) {
        at_upper_[static_cast<std::size_t>(entering)] = entering_sign > 0.0;
        x_(entering) = entering_sign > 0.0 ? hi_(entering) : lo_(entering);
        continue;
      }

      const Index leaving = basis_[static_cast<std::size_t>(leaving_position)];
      x_(leaving) = leaving_to_upper ? hi_(leaving) : lo_(leaving);
      at_upper_[static_cast<std::size_t>(leaving)] = leaving_to_upper;
      position_[static_cast<std::size_t>(leaving)] = -1;
      basis_[static_cast<std::size_t>(leaving_position)] = entering;
      position_[static_cast<std::size_t>(entering)] = leaving_position;
      at_upper_[static_cast<std::size_t>(entering)] = false;

      const double pivot = direction(leaving_position);
      binv_.row(leaving_position) /= pivot;
      for (Index i = 0; i < r_; ++i) {
        if (i == leaving_position || direction(i) == 0.0) continue;
        binv_.row(i) -= direction(i) * binv_.row(leaving_position);
      }
      if (++pivots_since_refactor_ >= refactor_interval_) refactor();
    }
  }

  const LpProblem& lp_;
  SimplexOptions opts_;
  Index n_;
  Index r_;
  Index total_;
  Vector lo_;
  Vector hi_;
  Vector x_;
  std::vector<bool> at_upper_;
  Vector sigma_;
  std::vector<Index> basis_;
  std::vector<Index> position_;
  Matrix binv_;
  std::size_t iterations_ = 0;
  std::size_t pivots_since_refactor_ = 0;
  std::size_t refactor_interval_ = 64;
};

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

void LpProblem::validate() const {
  const Index n = cost.size();
  require(lower.size() == n && upper.size() == n, "lp: bound vectors must match cost length");
  require(rows.cols() == n || rows.rows() == 0, "lp: constraint matrix has wrong column count");
  require(rhs.size() == rows.rows(), "lp: rhs length must match constraint rows");
  require(cost.allFinite() && rhs.allFinite() && rows.allFinite(), "lp: non-finite data");
  require(lower.allFinite() && upper.allFinite(), "lp: every variable needs finite bounds");
  for (Index j = 0; j < n; ++j) require(lower(j) <= upper(j), "lp: lower bound exceeds upper bound");
}

LpSolution solve_lp(const LpProblem& lp, const SimplexOptions& options) {
  lp.validate();
  if (lp.rows.cols() != lp.num_vars()) {
    LpProblem shaped = lp;
    shaped.rows = Matrix::Zero(0, lp.num_vars());
    RevisedSimplex simplex(shaped, options);
    return simplex.solve();
  }
  RevisedSimplex simplex(lp, options);
  return simplex.solve();
}

double lp_dual_objective(const LpProblem& lp, const Vector& row_duals) {
  const Vector reduced = lp.num_rows() > 0
                             ? Vector(lp.cost + lp.rows.transpose() * row_duals)
                             : Vector(lp.cost);
  double value = lp.num_rows() > 0 ? -lp.rhs.dot(row_duals) : 0.0;
  for (Index j = 0; j < lp.num_vars(); ++j) {
    value += std::min(reduced(j) * lp.lower(j), reduced(j) * lp.upper(j));
  }
  return value;
}

}  // namespace dualdec
