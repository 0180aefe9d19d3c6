#include <doctest.h>

#include <cmath>
#include <random>

#include "dualdec/reference.hpp"
#include "oracles.hpp"

using namespace dualdec;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

AgentProblem scalar_agent() {
  Matrix A(1, 1);
  A << -1.0;
  return AgentProblem(ObjectiveForm::linear(vec({1})), CouplingMap{A, vec({0})},
                      Polytope{Matrix(0, 1), Vector(0), vec({0}), vec({1})});
}

double lagrangian(const CoupledProblem& P, const std::vector<Vector>& x, const Vector& lambda) {
  return P.objective(x) + lambda.dot(P.coupling(x));
}

}  // namespace

TEST_CASE("local_argmin examples") {
  const AgentProblem a = scalar_agent();
  CHECK(local_argmin(a, vec({0}))(0) == 0.0);
  CHECK(local_argmin(a, vec({2}))(0) == 1.0);
  CHECK(local_argmin(a, vec({1}))(0) == 0.0);
  CHECK_THROWS_AS(local_argmin(a, vec({-1})), ValidationError);
}

TEST_CASE("solve_centralized on the two-agent instance") {
  const auto ref = solve_centralized(oracle::toy_problem());
  CHECK(ref.f_star == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ref.lambda_star(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ref.x_star.sum() == doctest::Approx(1.0));
  // Every split of one unit between the agents is optimal.
  CHECK_FALSE(ref.unique);

  // Analytic dual: phi(l) = l + 2 min(0, 1 - l), maximized at l = 1.
  const double l = oracle::maximize_concave(
      [](double t) { return t + 2.0 * std::min(0.0, 1.0 - t); }, 0.0, 5.0);
  CHECK(l == doctest::Approx(ref.lambda_star(0)).epsilon(1e-6));
}

TEST_CASE("brute force examples") {
  const auto grid = brute_force_reference(oracle::toy_problem(), 101);
  REQUIRE(grid.feasible);
  CHECK(std::abs(grid.f - 1.0) <= 0.01);
  CHECK(grid.spacing == doctest::Approx(0.01));

  std::vector<AgentProblem> empty;
  Matrix C(1, 1);
  C << 1.0;
  Matrix A(1, 1);
  A << 1.0;
  empty.emplace_back(ObjectiveForm::linear(vec({1})), CouplingMap{A, vec({0})},
                     Polytope{C, vec({-1}), vec({0}), vec({1})});
  CHECK_FALSE(brute_force_reference(CoupledProblem(empty, 1), 11).feasible);

  // p = 0 reduces to per-agent grid minima.
  std::vector<AgentProblem> free;
  free.emplace_back(ObjectiveForm::quadratic(vec({-0.3}), Matrix::Identity(1, 1)),
                    CouplingMap{Matrix(0, 1), Vector(0)},
                    Polytope{Matrix(0, 1), Vector(0), vec({-1}), vec({1})});
  free.emplace_back(ObjectiveForm::linear(vec({2})), CouplingMap{Matrix(0, 1), Vector(0)},
                    Polytope{Matrix(0, 1), Vector(0), vec({-1}), vec({1})});
  const auto g = brute_force_reference(CoupledProblem(free, 0), 21);
  REQUIRE(g.feasible);
  CHECK(g.x(0) == doctest::Approx(0.3));
  CHECK(g.x(1) == doctest::Approx(-1.0));
}

TEST_CASE("grid limits are enforced") {
  std::mt19937_64 rng(1);
  const auto big = oracle::random_ball_instance(rng, 3, {3, 3, 3}, 1, false);
  CHECK_THROWS_AS(brute_force_reference(big.problem, 2), ValidationError);
  const auto mid = oracle::random_ball_instance(rng, 2, {2, 2}, 1, false);
  CHECK_THROWS_AS(brute_force_reference(mid.problem, 100), ValidationError);
}

TEST_CASE("centralized optimum satisfies the saddle inequalities") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    CAPTURE(trial);
    const auto inst = oracle::random_ball_instance(rng, 3, {1, 2, 2}, 2, trial % 3 != 0);
    const CoupledProblem& P = inst.problem;
    const auto ref = solve_centralized(P);
    const auto xs = P.split(ref.x_star);
    CHECK((P.coupling(xs).array() <= 1e-8).all());
    CHECK((ref.lambda_star.array() >= -1e-10).all());
    const double mid = lagrangian(P, xs, ref.lambda_star);
    CHECK(mid == doctest::Approx(ref.f_star).epsilon(1e-8).scale(1.0));
    for (int s = 0; s < 50; ++s) {
      Vector lambda(2);
      lambda << 3.0 * unit(rng), 3.0 * unit(rng);
      CHECK(lagrangian(P, xs, lambda) <= mid + 1e-8);
      // Random feasible-box point pulled toward the ball centre stays in X_i.
      const Vector x = inst.center + inst.radius / std::sqrt(5.0) *
                                         (2.0 * Vector::NullaryExpr(5, [&] { return unit(rng); }) -
                                          Vector::Ones(5));
      CHECK(mid <= lagrangian(P, P.split(x), ref.lambda_star) + 1e-8);
    }
  }
}

TEST_CASE("local_argmin value equals the dual function") {
  std::mt19937_64 rng(41);
  std::exponential_distribution<double> expo(1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = oracle::random_ball_instance(rng, 2, {3, 2}, 3, trial % 2 == 0);
    for (const AgentProblem& a : inst.problem.agents()) {
      Vector lambda(3);
      lambda << expo(rng), expo(rng), expo(rng);
      const Vector x = local_argmin(a, lambda);
      CHECK(a.feasible.violation(x) <= 1e-8);
      CHECK(eval_local_lagrangian(a, x, lambda) ==
            doctest::Approx(eval_dual_function(a, lambda).value).epsilon(1e-8).scale(1.0));
      CHECK(local_argmin(a, lambda) == x);
    }
  }
}

TEST_CASE("supergradient identity from the local minimizer") {
  std::mt19937_64 rng(43);
  std::exponential_distribution<double> expo(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_ball_instance(rng, 2, {2, 2}, 2, trial % 2 == 1);
    for (const AgentProblem& a : inst.problem.agents()) {
      Vector l(2);
      l << expo(rng), expo(rng);
      const Vector g = eval_coupling(a, local_argmin(a, l));
      const double phi = eval_dual_function(a, l).value;
      for (int s = 0; s < 20; ++s) {
        Vector l2(2);
        l2 << expo(rng), expo(rng);
        CHECK(eval_dual_function(a, l2).value <= phi + g.dot(l2 - l) + 1e-8);
      }
    }
  }
}

TEST_CASE("centralized and grid references agree within the grid tolerance") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    CAPTURE(trial);
    const std::vector<Index> dims = trial % 2 == 0 ? std::vector<Index>{1, 2} : std::vector<Index>{1, 1, 1};
    const auto inst = oracle::random_ball_instance(rng, dims.size(), dims, 1, trial % 4 >= 2);
    const auto ref = solve_centralized(inst.problem);
    const auto grid = brute_force_reference(inst.problem, 81);
    REQUIRE(grid.feasible);
    const double tol = oracle::grid_tolerance(inst, ref.x_star, grid.spacing);
    CHECK(grid.f >= ref.f_star - 1e-8);
    CHECK(grid.f - ref.f_star <= tol);
  }
}
