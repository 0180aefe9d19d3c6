#include <doctest.h>

#include <cmath>
#include <random>

#include "dualdec/problem.hpp"
#include "oracles.hpp"

using namespace dualdec;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

Matrix mat(Index r, Index c, std::initializer_list<double> v) {
  Matrix out(r, c);
  Index k = 0;
  for (double x : v) {
    out(k / c, k % c) = x;
    ++k;
  }
  return out;
}

Polytope box(Index n, double lo, double hi) {
  return Polytope{Matrix(0, n), Vector(0), Vector::Constant(n, lo), Vector::Constant(n, hi)};
}

// f = x, g = -x on [0,1].
AgentProblem scalar_agent() {
  return AgentProblem(ObjectiveForm::linear(vec({1})), CouplingMap{mat(1, 1, {-1}), vec({0})},
                      box(1, 0, 1));
}

}  // namespace

TEST_CASE("eval_objective examples") {
  const AgentProblem lin(ObjectiveForm::linear(vec({1, 1})), CouplingMap{Matrix(0, 2), Vector(0)},
                         box(2, -5, 5));
  CHECK(eval_objective(lin, vec({0, 0})) == 0.0);
  const AgentProblem lin2(ObjectiveForm::linear(vec({1, 2})), CouplingMap{Matrix(0, 2), Vector(0)},
                          box(2, -5, 5));
  CHECK(eval_objective(lin2, vec({3, 1})) == 5.0);
  const AgentProblem quad(ObjectiveForm::quadratic(vec({0, 0}), Matrix::Identity(2, 2)),
                          CouplingMap{Matrix(0, 2), Vector(0)}, box(2, -5, 5));
  CHECK(eval_objective(quad, vec({2, 0})) == 2.0);
}

TEST_CASE("eval_coupling examples") {
  const AgentProblem a(ObjectiveForm::linear(vec({0})), CouplingMap{mat(1, 1, {1}), vec({0})},
                       box(1, -5, 5));
  CHECK(eval_coupling(a, vec({3}))(0) == 3.0);
  const AgentProblem b(ObjectiveForm::linear(vec({0, 0})), CouplingMap{mat(1, 2, {1, 1}), vec({1})},
                       box(2, -5, 5));
  CHECK(eval_coupling(b, vec({0, 0}))(0) == -1.0);
  const AgentProblem c(ObjectiveForm::linear(vec({0, 0})), CouplingMap{Matrix::Zero(1, 2), vec({2})},
                       box(2, -5, 5));
  CHECK(eval_coupling(c, vec({4, -3}))(0) == -2.0);
}

TEST_CASE("eval_local_lagrangian examples") {
  const AgentProblem a = scalar_agent();
  CHECK(eval_local_lagrangian(a, vec({0.3}), vec({0})) == eval_objective(a, vec({0.3})));
  CHECK(eval_local_lagrangian(a, vec({1}), vec({2})) == -1.0);
  CHECK_THROWS_AS(eval_local_lagrangian(a, vec({1}), vec({-0.1})), ValidationError);
}

TEST_CASE("eval_dual_function examples") {
  const AgentProblem a = scalar_agent();
  auto d0 = eval_dual_function(a, vec({0}));
  CHECK(d0.value == 0.0);
  CHECK(d0.minimizer(0) == 0.0);
  auto d2 = eval_dual_function(a, vec({2}));
  CHECK(d2.value == doctest::Approx(-1.0));
  CHECK(d2.minimizer(0) == doctest::Approx(1.0));
  auto d1 = eval_dual_function(a, vec({1}));
  CHECK(d1.value == doctest::Approx(0.0));
  CHECK(d1.minimizer(0) == 0.0);
  CHECK(eval_dual_function(a, vec({1})).minimizer == d1.minimizer);
}

TEST_CASE("empty polytope makes the dual function throw") {
  const AgentProblem a(ObjectiveForm::linear(vec({1})), CouplingMap{mat(1, 1, {1}), vec({0})},
                       Polytope{mat(1, 1, {1}), vec({-1}), vec({0}), vec({1})});
  CHECK_THROWS_AS(eval_dual_function(a, vec({0})), InfeasibleError);
}

TEST_CASE("construction rejects malformed data") {
  CHECK_THROWS_AS(ObjectiveForm::quadratic(vec({0, 0}), mat(2, 2, {1, 0, 0, -1})), ValidationError);
  CHECK_THROWS_AS(ObjectiveForm::quadratic(vec({0, 0}), mat(2, 2, {1, 1e-6, 0, 1})), ValidationError);
  CHECK_THROWS_AS(AgentProblem(ObjectiveForm::linear(vec({1})), CouplingMap{mat(1, 2, {1, 1}), vec({0})},
                               box(1, 0, 1)),
                  ValidationError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(AgentProblem(ObjectiveForm::linear(vec({1})), CouplingMap{mat(1, 1, {1}), vec({0})},
                               Polytope{Matrix(0, 1), Vector(0), vec({0}), vec({inf})}),
                  ValidationError);
  std::vector<AgentProblem> agents{scalar_agent()};
  CHECK_THROWS_AS(CoupledProblem(agents, 2), ValidationError);
  CHECK_THROWS_AS(CoupledProblem({}, 1), ValidationError);
}

TEST_CASE("check_slater examples") {
  std::vector<AgentProblem> agents;
  for (int i = 0; i < 2; ++i) {
    agents.emplace_back(ObjectiveForm::linear(vec({1})), CouplingMap{mat(1, 1, {-1}), vec({-0.5})},
                        box(1, 0, 1));
  }
  const CoupledProblem two(agents, 1);
  const SlaterReport s = check_slater(two);
  REQUIRE(s.holds);
  REQUIRE(s.witness.has_value());
  // Re-evaluate the certificate on the witness.
  const auto blocks = two.split(*s.witness);
  CHECK(two.coupling(blocks)(0) <= 1e-9);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(blocks[i](0) >= s.margin - 1e-9);
    CHECK(blocks[i](0) <= 1.0 - s.margin + 1e-9);
  }
  CHECK(s.margin > kSlaterTolerance);

  std::vector<AgentProblem> one;
  one.emplace_back(ObjectiveForm::linear(vec({1})), CouplingMap{mat(1, 1, {-1}), vec({-1})},
                   box(1, 0, 0.5));
  CHECK_FALSE(check_slater(CoupledProblem(one, 1)).holds);

  std::vector<AgentProblem> free;
  free.emplace_back(ObjectiveForm::linear(vec({1})), CouplingMap{Matrix(0, 1), Vector(0)},
                    box(1, 0, 1));
  CHECK(check_slater(CoupledProblem(free, 0)).holds);
}

TEST_CASE("compute_g_bound examples") {
  auto single = [](Matrix A, Vector b) {
    std::vector<AgentProblem> agents;
    const Index p = b.size();
    agents.emplace_back(ObjectiveForm::linear(vec({0})), CouplingMap{std::move(A), std::move(b)},
                        box(1, 0, 1));
    return CoupledProblem(std::move(agents), p);
  };
  CHECK(compute_g_bound(single(mat(1, 1, {1}), vec({0}))) == doctest::Approx(1.0));
  CHECK(compute_g_bound(single(mat(2, 1, {1, -1}), vec({0, 0}))) == doctest::Approx(std::sqrt(2.0)));
  CHECK(compute_g_bound(single(Matrix::Zero(1, 1), vec({5}))) == doctest::Approx(5.0));
}

TEST_CASE("G bounds ||g_i|| at sampled box corners and interior points") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_ball_instance(rng, 3, {2, 1, 2}, 2, trial % 2 == 1);
    const double G = compute_g_bound(inst.problem);
    for (const AgentProblem& a : inst.problem.agents()) {
      const Index n = a.dim();
      for (int s = 0; s < 200; ++s) {
        Vector x(n);
        for (Index j = 0; j < n; ++j) {
          const double u = unit(rng);
          x(j) = s < 100 ? (u < 0.5 ? -1.0 : 1.0) : -1.0 + 2.0 * u;
        }
        if (!a.feasible.contains(x)) continue;
        CHECK(eval_coupling(a, x).norm() <= G + 1e-9);
      }
    }
  }
}

TEST_CASE("separability of the Lagrangian") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = oracle::random_ball_instance(rng, 3, {1, 2, 3}, 2, true);
    const CoupledProblem& P = inst.problem;
    std::vector<Vector> x;
    for (const AgentProblem& a : P.agents()) {
      Vector xi(a.dim());
      for (Index j = 0; j < a.dim(); ++j) xi(j) = normal(rng);
      x.push_back(xi);
    }
    Vector lambda(2);
    lambda << std::abs(normal(rng)), std::abs(normal(rng));
    double lhs = 0.0;
    for (std::size_t i = 0; i < P.num_agents(); ++i) lhs += eval_local_lagrangian(P.agent(i), x[i], lambda);
    const double rhs = P.objective(x) + lambda.dot(P.coupling(x));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("dual functions are concave and bounded by feasible objectives") {
  std::mt19937_64 rng(9);
  std::exponential_distribution<double> expo(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_ball_instance(rng, 2, {2, 2}, 2, trial % 2 == 0);
    const CoupledProblem& P = inst.problem;
    for (int s = 0; s < 10; ++s) {
      Vector l1(2);
      Vector l2(2);
      l1 << expo(rng), expo(rng);
      l2 << expo(rng), expo(rng);
      double weak = 0.0;
      for (const AgentProblem& a : P.agents()) {
        const double mid = eval_dual_function(a, 0.5 * (l1 + l2)).value;
        const double v1 = eval_dual_function(a, l1).value;
        const double v2 = eval_dual_function(a, l2).value;
        CHECK(mid >= 0.5 * v1 + 0.5 * v2 - 1e-8);
        const auto d = eval_dual_function(a, l1);
        CHECK(a.feasible.contains(d.minimizer));
        CHECK(d.value == doctest::Approx(eval_local_lagrangian(a, d.minimizer, l1)).epsilon(1e-10).scale(1.0));
        weak += v1;
      }
      // The ball centre is feasible for the coupled program.
      CHECK(weak <= P.objective(P.split(inst.center)) + 1e-8);
    }
  }
}

TEST_CASE("stack and split are inverse") {
  const auto inst = [] {
    std::mt19937_64 rng(1);
    return oracle::random_ball_instance(rng, 3, {1, 3, 2}, 1, false);
  }();
  Vector x = Vector::LinSpaced(6, 0.0, 5.0);
  CHECK(inst.problem.stack(inst.problem.split(x)) == x);
  CHECK(inst.problem.offsets() == std::vector<Index>{0, 1, 4});
  CHECK(inst.problem.total_dim() == 6);
}

TEST_CASE("Slater hints: accepted when strictly feasible, otherwise solved") {
  std::vector<AgentProblem> agents;
  for (int i = 0; i < 2; ++i) {
    agents.emplace_back(ObjectiveForm::linear(vec({1})), CouplingMap{mat(1, 1, {-1}), vec({-0.5})},
                        box(1, 0, 1));
  }
  const CoupledProblem P(agents, 1);
  const Vector good = vec({0.6, 0.6});
  const SlaterReport a = check_slater(P, &good);
  CHECK(a.holds);
  CHECK(a.margin == doctest::Approx(0.4));
  CHECK(*a.witness == good);
  CHECK(slater_margin(P, vec({0.2, 0.2})) == -std::numeric_limits<double>::infinity());
  const Vector bad = vec({0.2, 0.2});
  const SlaterReport b = check_slater(P, &bad);
  CHECK(b.holds);
  CHECK(b.margin == doctest::Approx(0.5));
}
