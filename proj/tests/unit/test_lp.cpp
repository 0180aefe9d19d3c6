#include <doctest.h>

#include <random>

#include "dualdec/lp.hpp"
#include "oracles.hpp"

using namespace dualdec;

namespace {

LpProblem box_lp(Vector cost, Matrix rows, Vector rhs, Vector lower, Vector upper) {
  return LpProblem{std::move(cost), std::move(rows), std::move(rhs), std::move(lower),
                   std::move(upper)};
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

LpProblem random_lp(std::mt19937_64& rng, Index n, Index r) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LpProblem lp;
  lp.cost = Vector(n);
  lp.rows = Matrix(r, n);
  lp.rhs = Vector(r);
  lp.lower = Vector(n);
  lp.upper = Vector(n);
  for (Index j = 0; j < n; ++j) {
    lp.cost(j) = normal(rng);
    lp.lower(j) = -1.0 - unit(rng);
    lp.upper(j) = 1.0 + unit(rng);
  }
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < n; ++j) lp.rows(i, j) = normal(rng);
    lp.rhs(i) = normal(rng);
  }
  return lp;
}

}  // namespace

TEST_CASE("min x on [0,1] without rows") {
  const auto sol = solve_lp(box_lp(vec({1}), Matrix(0, 1), Vector(0), vec({0}), vec({1})));
  REQUIRE(sol.optimal());
  CHECK(sol.x(0) == doctest::Approx(0.0));
  CHECK(sol.objective == doctest::Approx(0.0));
}

TEST_CASE("min -x with x <= 0.5 has row dual 1") {
  Matrix C(1, 1);
  C << 1.0;
  const auto sol = solve_lp(box_lp(vec({-1}), C, vec({0.5}), vec({0}), vec({1})));
  REQUIRE(sol.optimal());
  CHECK(sol.x(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.duals(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.objective == doctest::Approx(-0.5));
}

TEST_CASE("row x <= -1 with x in [0,1] is infeasible") {
  Matrix C(1, 1);
  C << 1.0;
  const auto sol = solve_lp(box_lp(vec({1}), C, vec({-1}), vec({0}), vec({1})));
  CHECK(sol.status == LpStatus::Infeasible);
  CHECK_FALSE(sol.optimal());
}

TEST_CASE("zero cost picks the lower bound") {
  const auto sol = solve_lp(box_lp(vec({0, 0}), Matrix(0, 2), Vector(0), vec({-1, 2}), vec({3, 4})));
  REQUIRE(sol.optimal());
  CHECK(sol.x(0) == -1.0);
  CHECK(sol.x(1) == 2.0);
}

TEST_CASE("infinite bounds and mismatched dimensions are rejected") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(solve_lp(box_lp(vec({1}), Matrix(0, 1), Vector(0), vec({0}), vec({inf}))),
                  ValidationError);
  CHECK_THROWS_AS(solve_lp(box_lp(vec({1}), Matrix(1, 1), Vector(2), vec({0}), vec({1}))),
                  ValidationError);
  CHECK_THROWS_AS(solve_lp(box_lp(vec({1}), Matrix(0, 1), Vector(0), vec({2}), vec({1}))),
                  ValidationError);
}

TEST_CASE("random LPs agree with vertex enumeration and satisfy KKT") {
  std::mt19937_64 rng(7);
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 1 + static_cast<Index>(trial % 4);
    const Index r = static_cast<Index>((trial / 4) % 5);
    const LpProblem lp = random_lp(rng, n, r);
    const auto sol = solve_lp(lp);
    const auto ref = oracle::lp_by_vertices(lp.cost, lp.rows, lp.rhs, lp.lower, lp.upper);
    CAPTURE(trial);
    if (!ref) {
      CHECK(sol.status == LpStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(sol.optimal());
    ++optimal;
    CHECK(sol.objective == doctest::Approx(ref->value).epsilon(1e-9).scale(1.0));

    const QpProblem as_qp{Matrix::Zero(n, n), lp};
    const KktResiduals kkt = kkt_residuals(as_qp, sol);
    CHECK(kkt.primal <= 1e-8);
    CHECK(kkt.stationarity <= 1e-8);
    CHECK(kkt.complementarity <= 1e-8);
    CHECK(kkt.dual_sign <= 1e-10);
    // Strong duality.
    CHECK(lp_dual_objective(lp, sol.duals) == doctest::Approx(sol.objective).epsilon(1e-8).scale(1.0));
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 0);
}

TEST_CASE("pure Bland and the default rule reach the same optimum") {
  std::mt19937_64 rng(11);
  SimplexOptions bland;
  bland.rule = PivotRule::Bland;
  for (int trial = 0; trial < 100; ++trial) {
    const LpProblem lp = random_lp(rng, 4, 6);
    const auto a = solve_lp(lp);
    const auto b = solve_lp(lp, bland);
    REQUIRE(a.status == b.status);
    if (a.optimal()) CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("repeated solves are bit-identical") {
  std::mt19937_64 rng(3);
  const LpProblem lp = random_lp(rng, 6, 8);
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  REQUIRE(a.status == b.status);
  CHECK(a.x == b.x);
  CHECK(a.duals == b.duals);
  CHECK(a.objective == b.objective);
}

TEST_CASE("degenerate vertex with many tight rows") {
  // Five rows through the optimal corner (1, 1).
  Matrix C(5, 2);
  C << 1, 0, 0, 1, 1, 1, 2, 1, 1, 2;
  const auto sol = solve_lp(box_lp(vec({-1, -1}), C, vec({1, 1, 2, 3, 3}), vec({0, 0}), vec({5, 5})));
  REQUIRE(sol.optimal());
  CHECK(sol.objective == doctest::Approx(-2.0));
  const KktResiduals kkt = kkt_residuals(QpProblem{Matrix::Zero(2, 2), box_lp(vec({-1, -1}), C,
                                                                         vec({1, 1, 2, 3, 3}),
                                                                         vec({0, 0}), vec({5, 5}))},
                                         sol);
  CHECK(kkt.stationarity <= 1e-10);
  CHECK(kkt.complementarity <= 1e-10);
}
