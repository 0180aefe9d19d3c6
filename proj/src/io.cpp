#include "dualdec/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace dualdec {

namespace {

Vector parse_vector(const Json& j, const std::string& name) {
  require(j.is_array(), name + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    require(j[k].is_number(), name + ": expected numbers");
    v(static_cast<Index>(k)) = j[k].get<double>();
  }
  return v;
}

Matrix parse_matrix(const Json& j, Index rows, Index cols, const std::string& name) {
  require(j.is_array(), name + ": expected an array");
  Matrix M(rows, cols);
  if (rows * cols == 0) {
    require(j.empty() || (j.size() == static_cast<std::size_t>(rows) &&
                          std::all_of(j.begin(), j.end(), [](const Json& r) { return r.is_array() && r.empty(); })),
            name + ": expected an empty matrix");
    return M;
  }
  if (!j.empty() && j.front().is_array()) {
    require(j.size() == static_cast<std::size_t>(rows), name + ": wrong number of rows");
    for (Index r = 0; r < rows; ++r) {
      const Json& row = j[static_cast<std::size_t>(r)];
      require(row.is_array() && row.size() == static_cast<std::size_t>(cols),
              name + ": wrong number of columns");
      for (Index c = 0; c < cols; ++c) {
        require(row[static_cast<std::size_t>(c)].is_number(), name + ": expected numbers");
        M(r, c) = row[static_cast<std::size_t>(c)].get<double>();
      }
    }
    return M;
  }
  require(j.size() == static_cast<std::size_t>(rows * cols), name + ": wrong flat size");
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const Json& x = j[static_cast<std::size_t>(r * cols + c)];
      require(x.is_number(), name + ": expected numbers");
      M(r, c) = x.get<double>();
    }
  }
  return M;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Json matrix_json(const Matrix& M) {
  Json out = Json::array();
  for (Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  require(j.is_object() && j.contains(key), where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::vector<Edge> parse_edges(const Json& j, std::size_t m, const std::string& name) {
  require(j.is_array(), name + ": expected an array of [u, v] pairs");
  std::vector<Edge> edges;
  for (const auto& e : j) {
    require(e.is_array() && e.size() == 2 && e[0].is_number_unsigned() && e[1].is_number_unsigned(),
            name + ": expected [u, v] with nonnegative integers");
    Edge edge{e[0].get<std::size_t>(), e[1].get<std::size_t>()};
    require(edge.u < m && edge.v < m && edge.u != edge.v, name + ": edge endpoint out of range");
    edges.push_back(edge);
  }
  return edges;
}

}  // namespace

Json problem_to_json(const CoupledProblem& problem) {
  Json agents = Json::array();
  for (const auto& a : problem.agents()) {
    Json objective{{"q", vector_json(a.objective.linear_part())}};
    if (!a.objective.is_linear()) objective["Q"] = matrix_json(a.objective.quadratic_part());
    agents.push_back({{"n", a.dim()},
                      {"objective", objective},
                      {"coupling", {{"A", matrix_json(a.coupling.A)}, {"b", vector_json(a.coupling.b)}}},
                      {"polytope",
                       {{"C", matrix_json(a.feasible.C)},
                        {"d", vector_json(a.feasible.d)},
                        {"lb", vector_json(a.feasible.lower)},
                        {"ub", vector_json(a.feasible.upper)}}}});
  }
  return {{"m", problem.num_agents()}, {"p", problem.coupling_dim()}, {"agents", agents}};
}

CoupledProblem problem_from_json(const Json& j) {
  const Json& jm = field(j, "m", "problem");
  const Json& jp = field(j, "p", "problem");
  require(jm.is_number_unsigned() && jp.is_number_unsigned(), "problem: m and p must be nonnegative integers");
  const auto m = jm.get<std::size_t>();
  const auto p = static_cast<Index>(jp.get<std::size_t>());
  const Json& ja = field(j, "agents", "problem");
  require(ja.is_array() && ja.size() == m, "problem: agents array must have m entries");

  std::vector<AgentProblem> agents;
  for (std::size_t i = 0; i < m; ++i) {
    const std::string where = "agent " + std::to_string(i);
    const Json& a = ja[i];
    const Json& jn = field(a, "n", where);
    require(jn.is_number_unsigned(), where + ": n must be a nonnegative integer");
    const auto n = static_cast<Index>(jn.get<std::size_t>());

    const Json& jo = field(a, "objective", where);
    const Vector q = parse_vector(field(jo, "q", where + " objective"), where + " q");
    require(q.size() == n, where + ": q must have length n");
    ObjectiveForm objective =
        jo.contains("Q") ? ObjectiveForm::quadratic(q, parse_matrix(jo.at("Q"), n, n, where + " Q"))
                         : ObjectiveForm::linear(q);

    const Json& jc = field(a, "coupling", where);
    const Vector b = parse_vector(field(jc, "b", where + " coupling"), where + " b");
    require(b.size() == p, where + ": b must have length p");
    const Matrix A = parse_matrix(field(jc, "A", where + " coupling"), p, n, where + " A");

    const Json& jx = field(a, "polytope", where);
    const Vector d = parse_vector(field(jx, "d", where + " polytope"), where + " d");
    const Matrix C = parse_matrix(field(jx, "C", where + " polytope"), d.size(), n, where + " C");
    const Vector lb = parse_vector(field(jx, "lb", where + " polytope"), where + " lb");
    const Vector ub = parse_vector(field(jx, "ub", where + " polytope"), where + " ub");

    agents.emplace_back(std::move(objective), CouplingMap{A, b}, Polytope{C, d, lb, ub});
  }
  return CoupledProblem(std::move(agents), p);
}

Json schedule_to_json(const WeightSchedule& schedule) {
  Json mats = Json::array();
  for (const auto& A : schedule.matrices()) mats.push_back(matrix_json(A));
  return {{"m", schedule.num_agents()},
          {"eta", schedule.eta()},
          {"window", schedule.window()},
          {"period", schedule.period()},
          {"matrices", mats}};
}

WeightSchedule schedule_from_json(const Json& j) {
  const Json& jm = field(j, "m", "schedule");
  require(jm.is_number_unsigned() && jm.get<std::size_t>() >= 1, "schedule: m must be positive");
  const auto m = jm.get<std::size_t>();
  const double eta = j.contains("eta") ? j.at("eta").get<double>() : 0.0;
  const std::string type = j.value("type", std::string("matrices"));
  if (type == "alternating") {
    return alternating_partition_schedule(m, parse_edges(field(j, "edges_a", "schedule"), m, "edges_a"),
                                          parse_edges(j.value("edges_b", Json::array()), m, "edges_b"),
                                          eta);
  }
  if (type == "metropolis") {
    return static_metropolis_schedule(m, parse_edges(field(j, "edges", "schedule"), m, "edges"), eta);
  }
  require(type == "matrices", "schedule: unknown type \"" + type + "\"");
  const Json& jmat = field(j, "matrices", "schedule");
  require(jmat.is_array() && !jmat.empty(), "schedule: matrices must be a nonempty array");
  if (j.contains("period")) {
    require(j.at("period").get<std::size_t>() == jmat.size(), "schedule: period does not match matrices");
  }
  std::vector<Matrix> mats;
  const auto mi = static_cast<Index>(m);
  for (std::size_t k = 0; k < jmat.size(); ++k) {
    mats.push_back(parse_matrix(jmat[k], mi, mi, "schedule matrix " + std::to_string(k)));
  }
  const std::size_t window = j.value("window", mats.size());
  require(eta > 0.0, "schedule: explicit matrices need a declared eta");
  return WeightSchedule(std::move(mats), eta, window);
}

Json reference_to_json(const CentralizedReference& reference) {
  return {{"x_star", vector_json(reference.x_star)},
          {"lambda_star", vector_json(reference.lambda_star)},
          {"f_star", reference.f_star},
          {"unique", reference.unique}};
}

CentralizedReference reference_from_json(const Json& j) {
  CentralizedReference ref;
  ref.x_star = parse_vector(field(j, "x_star", "reference"), "x_star");
  ref.lambda_star = parse_vector(field(j, "lambda_star", "reference"), "lambda_star");
  ref.f_star = field(j, "f_star", "reference").get<double>();
  ref.unique = j.value("unique", false);
  return ref;
}

Json graph_report_to_json(const GraphReport& report) {
  Json violations = Json::array();
  auto idx = [](std::size_t v) { return v == ScheduleViolation::npos ? Json(nullptr) : Json(v); };
  for (const auto& v : report.violations) {
    violations.push_back({{"k", idx(v.k)}, {"i", idx(v.i)}, {"j", idx(v.j)}, {"reason", v.reason}});
  }
  return {{"doubly_stochastic_ok", report.doubly_stochastic_ok},
          {"self_weight_ok", report.self_weight_ok},
          {"eta_ok", report.eta_ok},
          {"strongly_connected_ok", report.strongly_connected_ok},
          {"T_recurrence_ok", report.T_recurrence_ok},
          {"admissible", report.admissible()},
          {"violations", violations}};
}

Json slater_to_json(const SlaterReport& report) {
  Json out{{"holds", report.holds}, {"margin", report.margin}};
  out["witness"] = report.witness ? vector_json(*report.witness) : Json(nullptr);
  return out;
}

Json lemma_constants_to_json(const LemmaConstants& c) {
  return {{"eta", c.eta},       {"m", c.m},         {"T", c.T},           {"psi", c.psi},
          {"q", c.q},           {"alpha1", c.alpha1}, {"alpha2", c.alpha2}, {"alpha3", c.alpha3},
          {"G", c.G},           {"D", c.D},         {"alpha1_admissible", c.alpha1_admissible()}};
}

Json bound_report_to_json(const BoundCheckReport& report) {
  Json out{{"holds_for_all_N", report.holds_for_all_N},
           {"margin_min", report.margin_min},
           {"consistent", report.consistent},
           {"horizon", report.samples.empty() ? 0 : report.samples.back().N}};
  out["first_violation"] = report.first_violation ? Json(*report.first_violation) : Json(nullptr);
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  require(out.good(), "cannot write " + path);
  out << j.dump(2) << '\n';
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, bool with_average) {
  out << "k,step_size,obj_hat,obj_tilde,viol_hat_max,viol_tilde_max,dual_disagreement,"
         "dual_dist_to_ref,sum_e_sq,max_e_norm,dual_gap";
  if (with_average) {
    for (Index j = 0; j < trace.p; ++j) out << ",v_" << j;
  }
  out << '\n';
  for (const auto& r : trace.records) {
    out << r.k;
    for (double x : {r.step_size, r.obj_hat, r.obj_tilde, r.viol_hat_max, r.viol_tilde_max,
                     r.dual_disagreement, r.dual_dist_to_ref, r.sum_e_sq, r.max_e_norm, r.dual_gap}) {
      out << ',' << format_double(x);
    }
    if (with_average) {
      for (Index j = 0; j < r.v.size(); ++j) out << ',' << format_double(r.v(j));
    }
    out << '\n';
  }
}

void write_multipliers_csv(std::ostream& out, const RunTrace& trace) {
  require(!trace.multipliers.empty(), "multiplier history was not recorded");
  out << "k,agent,row,lambda\n";
  for (std::size_t k = 0; k < trace.multipliers.size(); ++k) {
    const Matrix& L = trace.multipliers[k];
    for (Index i = 0; i < L.rows(); ++i) {
      for (Index j = 0; j < L.cols(); ++j) {
        out << k << ',' << i << ',' << j << ',' << format_double(L(i, j)) << '\n';
      }
    }
  }
}

void write_lemma_csv(std::ostream& out, const BoundCheckReport& report) {
  out << "N,lhs,rhs\n";
  for (const auto& s : report.samples) {
    out << s.N << ',' << format_double(s.lhs) << ',' << format_double(s.rhs) << '\n';
  }
}

void write_rate_csv(std::ostream& out, const std::vector<RateSample>& samples) {
  out << "r,gap,min_gap,c_sum,product,running_max\n";
  for (const auto& s : samples) {
    out << s.r << ',' << format_double(s.gap) << ',' << format_double(s.min_gap) << ','
        << format_double(s.c_sum) << ',' << format_double(s.product) << ','
        << format_double(s.running_max) << '\n';
  }
}

Json trace_summary(const RunTrace& trace, const CentralizedReference* reference, double zero_tol) {
  require(!trace.records.empty(), "summary: empty trace");
  const auto& last = trace.records.back();
  Json refresh = Json::array();
  std::size_t triggered = 0;
  for (const auto& ks : trace.refresh_index) {
    refresh.push_back(ks ? Json(*ks) : Json(nullptr));
    triggered += ks.has_value();
  }
  std::size_t near_zero = 0;
  for (Index j = 0; j < last.v.size(); ++j) near_zero += last.v(j) <= zero_tol;

  Json out{{"m", trace.m},
           {"p", trace.p},
           {"seed", trace.seed},
           {"iterations", trace.iterations()},
           {"obj_hat", last.obj_hat},
           {"obj_tilde", last.obj_tilde},
           {"viol_hat_max", last.viol_hat_max},
           {"viol_tilde_max", last.viol_tilde_max},
           {"dual_disagreement", last.dual_disagreement},
           {"max_e_norm", last.max_e_norm},
           {"refresh_index", refresh},
           {"refresh_triggered", triggered},
           {"near_zero_multipliers", near_zero},
           {"positive_multipliers", static_cast<std::size_t>(last.v.size()) - near_zero},
           {"v", vector_json(last.v)}};
  if (reference != nullptr) {
    const double scale = std::max(1.0, std::abs(reference->f_star));
    double dist = 0.0;
    for (Index i = 0; i < trace.final_lambda.rows(); ++i) {
      dist = std::max(dist, (trace.final_lambda.row(i).transpose() - reference->lambda_star).norm());
    }
    out["f_star"] = reference->f_star;
    out["gap_hat_rel"] = std::abs(last.obj_hat - reference->f_star) / scale;
    out["gap_tilde_rel"] = std::abs(last.obj_tilde - reference->f_star) / scale;
    out["dual_dist_to_ref"] = dist;
  }
  return out;
}

}  // namespace dualdec
