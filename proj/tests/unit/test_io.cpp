#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dualdec/io.hpp"
#include "oracles.hpp"

using namespace dualdec;

TEST_CASE("problem JSON round trip is exact") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = oracle::random_ball_instance(rng, 3, {1, 2, 3}, 2, trial % 2 == 0);
    const Json j = problem_to_json(inst.problem);
    const CoupledProblem back = problem_from_json(Json::parse(j.dump()));
    REQUIRE(back.num_agents() == 3);
    CHECK(back.coupling_dim() == 2);
    for (std::size_t i = 0; i < 3; ++i) {
      const AgentProblem& a = inst.problem.agent(i);
      const AgentProblem& b = back.agent(i);
      CHECK(a.objective.linear_part() == b.objective.linear_part());
      CHECK(a.objective.quadratic_part() == b.objective.quadratic_part());
      CHECK(a.objective.kind() == b.objective.kind());
      CHECK(a.coupling.A == b.coupling.A);
      CHECK(a.coupling.b == b.coupling.b);
      CHECK(a.feasible.C == b.feasible.C);
      CHECK(a.feasible.d == b.feasible.d);
      CHECK(a.feasible.lower == b.feasible.lower);
      CHECK(a.feasible.upper == b.feasible.upper);
    }
    CHECK(problem_to_json(back).dump() == j.dump());
  }
}

TEST_CASE("flat row-major matrices and a missing Q") {
  const Json j = Json::parse(R"({"m": 1, "p": 1, "agents": [{"n": 2,
      "objective": {"q": [1, 2]},
      "coupling": {"A": [1, -1], "b": [0.5]},
      "polytope": {"C": [1, 1], "d": [1], "lb": [0, 0], "ub": [1, 1]}}]})");
  const CoupledProblem P = problem_from_json(j);
  CHECK(P.agent(0).objective.is_linear());
  CHECK(P.agent(0).coupling.A(0, 1) == -1.0);
  CHECK(P.agent(0).feasible.C.rows() == 1);
}

TEST_CASE("malformed problem files are rejected") {
  CHECK_THROWS(problem_from_json(Json::parse(R"({"m": 1, "p": 1})")));
  CHECK_THROWS(problem_from_json(Json::parse(R"({"m": 2, "p": 1, "agents": [{"n": 1,
      "objective": {"q": [1]}, "coupling": {"A": [[1]], "b": [0]},
      "polytope": {"C": [], "d": [], "lb": [0], "ub": [1]}}]})")));
  CHECK_THROWS(problem_from_json(Json::parse(R"({"m": 1, "p": 1, "agents": [{"n": 1,
      "objective": {"q": [1]}, "coupling": {"A": [[1, 2]], "b": [0]},
      "polytope": {"C": [], "d": [], "lb": [0], "ub": [1]}}]})")));
}

TEST_CASE("schedule files") {
  const WeightSchedule s = alternating_partition_schedule(4, {{0, 1}, {2, 3}}, {{1, 2}, {3, 0}});
  const WeightSchedule back = schedule_from_json(Json::parse(schedule_to_json(s).dump()));
  REQUIRE(back.period() == s.period());
  CHECK(back.eta() == s.eta());
  CHECK(back.window() == s.window());
  for (std::size_t k = 0; k < s.period(); ++k) CHECK(back.at(k) == s.at(k));

  const WeightSchedule alt = schedule_from_json(Json::parse(
      R"({"type": "alternating", "m": 4, "edges_a": [[0,1],[2,3]], "edges_b": [[1,2],[3,0]]})"));
  for (std::size_t k = 0; k < 2; ++k) CHECK(alt.at(k) == s.at(k));

  const WeightSchedule metro =
      schedule_from_json(Json::parse(R"({"type": "metropolis", "m": 3, "edges": [[0,1],[1,2]]})"));
  CHECK(metro.at(0) == static_metropolis_schedule(3, {{0, 1}, {1, 2}}).at(0));

  CHECK_THROWS(schedule_from_json(Json::parse(R"({"m": 2, "eta": 0, "window": 1,
      "matrices": [[[0.5,0.5],[0.5,0.5]]]})")));
  CHECK_THROWS(schedule_from_json(Json::parse(R"({"type": "ring", "m": 3})")));
}

TEST_CASE("reference round trip") {
  const auto ref = solve_centralized(oracle::toy_problem());
  const auto back = reference_from_json(Json::parse(reference_to_json(ref).dump()));
  CHECK(back.x_star == ref.x_star);
  CHECK(back.lambda_star == ref.lambda_star);
  CHECK(back.f_star == ref.f_star);
  CHECK(back.unique == ref.unique);
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("CSV writers") {
  const CoupledProblem toy = oracle::toy_problem();
  const WeightSchedule s = static_metropolis_schedule(2, {{0, 1}});
  RunConfig cfg;
  cfg.iterations = 5;
  cfg.record_history = true;
  const RunTrace t = run(toy, s, cfg);

  std::ostringstream trace;
  write_trace_csv(trace, t, true);
  std::istringstream lines(trace.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "k,step_size,obj_hat,obj_tilde,viol_hat_max,viol_tilde_max,dual_disagreement,"
        "dual_dist_to_ref,sum_e_sq,max_e_norm,dual_gap,v_0");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 5);

  std::ostringstream mult;
  write_multipliers_csv(mult, t);
  int mrows = -1;
  std::istringstream ml(mult.str());
  for (std::string line; std::getline(ml, line);) ++mrows;
  CHECK(mrows == 6 * 2 * 1);

  std::ostringstream lemma;
  BoundCheckReport r;
  r.samples = {{0, 0.0, 1.0}, {1, 0.5, 2.0}};
  write_lemma_csv(lemma, r);
  CHECK(lemma.str() == "N,lhs,rhs\n0,0,1\n1,0.5,2\n");
}

TEST_CASE("summary fields") {
  const CoupledProblem toy = oracle::toy_problem();
  const WeightSchedule s = static_metropolis_schedule(2, {{0, 1}});
  RunConfig cfg;
  cfg.iterations = 50;
  cfg.seed = 42;
  const auto ref = solve_centralized(toy);
  const RunTrace t = run(toy, s, cfg, ref);
  const Json j = trace_summary(t, &ref);
  CHECK(j.at("seed") == 42);
  CHECK(j.at("m") == 2);
  CHECK(j.at("iterations") == 50);
  CHECK(j.contains("gap_hat_rel"));
  CHECK(j.at("refresh_triggered") == 0);
  CHECK_FALSE(trace_summary(t, nullptr).contains("gap_hat_rel"));
}

TEST_CASE("file helpers report missing and malformed files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dualdec_io_test";
  fs::create_directories(dir);
  CHECK_THROWS_AS(read_json_file((dir / "missing.json").string()), ValidationError);
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{not json";
  }
  CHECK_THROWS_AS(read_json_file((dir / "bad.json").string()), ValidationError);
  write_json_file((dir / "ok.json").string(), Json{{"a", 1}});
  CHECK(read_json_file((dir / "ok.json").string()).at("a") == 1);
  fs::remove_all(dir);
}
