#include "dualdec/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dualdec {

Vector consensus_average(const Matrix& lambdas) {
  require(lambdas.rows() >= 1, "consensus average: need at least one agent");
  return lambdas.colwise().mean().transpose();
}

double default_alpha1(double G) {
  require(std::isfinite(G) && G >= 0.0, "alpha1: G must be finite and nonnegative");
  return 0.5 / (1.0 + G);
}

LemmaConstants lemma1_constants(const WeightSchedule& schedule, const RunTrace& trace,
                                double alpha1, double G) {
  const double eta = schedule.eta();
  const std::size_t T = schedule.window();
  const std::size_t m = schedule.num_agents();
  require(eta > 0.0 && eta < 1.0, "lemma constants: eta must lie in (0,1)");
  require(T >= 1, "lemma constants: T must be at least 1");
  require(m >= 2, "lemma constants: need at least two agents");
  require(alpha1 > 0.0 && std::isfinite(alpha1), "lemma constants: alpha1 must be positive");
  require(trace.records.size() >= 2, "lemma constants: trace needs c(0) and c(1)");
  require(trace.initial_e_norms.size() == trace.m && trace.initial_lambda_norms.size() == trace.m,
          "lemma constants: trace lacks initial norms");

  LemmaConstants c;
  c.eta = eta;
  c.m = m;
  c.T = T;
  c.alpha1 = alpha1;
  c.G = G;
  const double e = static_cast<double>((m - 1) * T);
  const double eta_pow = std::pow(eta, e);
  c.psi = 2.0 * (1.0 + 1.0 / eta_pow) / (1.0 - eta_pow);
  c.q = std::pow(1.0 - eta_pow, 1.0 / e);

  const double md = static_cast<double>(m);
  const double ratio = c.psi / (1.0 - c.q);
  c.alpha2 = (2.0 * md / alpha1) * (md * md * ratio * ratio + 4.0);

  c.c0 = trace.records[0].step_size;
  c.c1 = trace.records[1].step_size;
  for (double v : trace.initial_e_norms) c.sum_e1_sq += v * v;
  for (double v : trace.initial_lambda_norms) c.sum_lambda0 += v;
  c.alpha3 = 0.5 * alpha1 * c.sum_e1_sq +
             2.0 * md * md * md * ratio * ratio / alpha1 * c.c0 * c.c0 +
             2.0 * md * c.psi * c.q / (1.0 - c.q) * c.c1 * c.sum_lambda0;

  c.D = 0.0;
  for (double v : trace.initial_lambda_norms) c.D = std::max(c.D, v);
  for (const auto& r : trace.records) c.D = std::max(c.D, r.max_lambda_norm);
  return c;
}

BoundCheckReport check_lemma1(const RunTrace& trace, const LemmaConstants& constants,
                              std::size_t horizon) {
  require(!trace.records.empty(), "lemma check: empty trace");
  require(horizon + 1 <= trace.records.size(),
          "lemma check: horizon needs lambda(N+1), beyond the stored trace");

  BoundCheckReport report;
  if (constants.m != trace.m || trace.records.size() < 2 ||
      constants.c0 != trace.records[0].step_size || constants.c1 != trace.records[1].step_size) {
    report.consistent = false;
  } else {
    double e1 = 0.0;
    double l0 = 0.0;
    for (double v : trace.initial_e_norms) e1 += v * v;
    for (double v : trace.initial_lambda_norms) l0 += v;
    report.consistent = e1 == constants.sum_e1_sq && l0 == constants.sum_lambda0;
  }

  double lhs = 0.0;
  double sum_e = 0.0;
  double sum_c2 = 0.0;
  report.holds_for_all_N = true;
  report.margin_min = std::numeric_limits<double>::infinity();
  report.samples.reserve(horizon + 1);
  for (std::size_t N = 0; N <= horizon; ++N) {
    if (N >= 1) {
      // records[N] describes iterate N+1 and carries c(N).
      const auto& r = trace.records[N];
      lhs += 2.0 * r.step_size * r.sum_disagreement;
      sum_e += r.sum_e_sq;
      sum_c2 += r.step_size * r.step_size;
    }
    const double rhs = constants.alpha1 * sum_e + constants.alpha2 * sum_c2 + constants.alpha3;
    report.samples.push_back({N, lhs, rhs});
    report.margin_min = std::min(report.margin_min, rhs - lhs);
    if (!(lhs < rhs) && !report.first_violation) {
      report.first_violation = N;
      report.holds_for_all_N = false;
    }
  }
  return report;
}

std::vector<RateSample> dual_gap_rate(const RunTrace& trace) {
  std::vector<RateSample> out;
  out.reserve(trace.records.size());
  double min_gap = std::numeric_limits<double>::infinity();
  double c_sum = 0.0;
  double running_max = 0.0;
  for (std::size_t r = 0; r < trace.records.size(); ++r) {
    const auto& rec = trace.records[r];
    if (std::isnan(rec.dual_gap)) {
      throw ValidationError("dual gap rate: trace was recorded without full diagnostics");
    }
    min_gap = std::min(min_gap, rec.dual_gap);
    c_sum += rec.step_size;
    RateSample s;
    s.r = r;
    s.gap = rec.dual_gap;
    s.min_gap = min_gap;
    s.c_sum = c_sum;
    s.product = min_gap * c_sum;
    running_max = std::max(running_max, s.product);
    s.running_max = running_max;
    out.push_back(s);
  }
  return out;
}

double rate_running_max_change(const std::vector<RateSample>& samples) {
  require(!samples.empty(), "rate change: no samples");
  const double end = samples.back().running_max;
  const double mid = samples[samples.size() / 2].running_max;
  if (end == 0.0) return 0.0;
  return (end - mid) / end;
}

ConsensusTrends consensus_trends(const RunTrace& trace, double tail_fraction) {
  require(!trace.records.empty(), "consensus trends: empty trace");
  require(tail_fraction > 0.0 && tail_fraction <= 1.0, "consensus trends: bad tail fraction");
  const std::size_t K = trace.records.size();
  const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(K)));
  ConsensusTrends t;
  for (std::size_t j = 0; j < K; ++j) {
    const auto& r = trace.records[j];
    t.total_sum_e_sq += r.sum_e_sq;
    if (j >= K - tail) t.tail_increase += r.sum_e_sq;
    if (j < 10) t.early_max_e = std::max(t.early_max_e, r.max_e_norm);
  }
  t.final_max_e = trace.records.back().max_e_norm;
  t.final_disagreement = trace.records.back().dual_disagreement;
  return t;
}

std::vector<ReferenceDistance> distance_to_reference(const RunTrace& trace,
                                                     const CentralizedReference& reference) {
  require(reference.lambda_star.size() == trace.p,
          "reference distance: multiplier dimension mismatch");
  const bool have_history = trace.multipliers.size() == trace.records.size() + 1;
  require(have_history || trace.has_reference,
          "reference distance: trace has neither multiplier history nor reference distances");
  const bool point = reference.unique && trace.x_hat_history.size() == trace.records.size() + 1;
  if (point) {
    require(reference.x_star.size() == trace.x_hat_history.front().size(),
            "reference distance: primal dimension mismatch");
  }

  std::vector<ReferenceDistance> out;
  out.reserve(trace.records.size());
  for (std::size_t j = 0; j < trace.records.size(); ++j) {
    const auto& r = trace.records[j];
    ReferenceDistance d;
    d.k = r.k;
    if (have_history) {
      const Matrix& lam = trace.multipliers[j + 1];
      d.dual_distance = 0.0;
      for (Index i = 0; i < lam.rows(); ++i) {
        d.dual_distance =
            std::max(d.dual_distance, (lam.row(i).transpose() - reference.lambda_star).norm());
      }
    } else {
      d.dual_distance = r.dual_dist_to_ref;
    }
    d.objective_gap = std::abs(r.obj_hat - reference.f_star);
    d.violation = r.viol_hat_max;
    if (point) d.point_distance = (trace.x_hat_history[j + 1] - reference.x_star).norm();
    out.push_back(d);
  }
  return out;
}

}  // namespace dualdec
