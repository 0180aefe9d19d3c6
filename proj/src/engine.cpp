#include "dualdec/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <utility>

namespace dualdec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

StepSizeSchedule::StepSizeSchedule(double beta, std::vector<double> values)
    : beta_(beta), values_(std::move(values)) {}

StepSizeSchedule StepSizeSchedule::harmonic(double beta) {
  require(std::isfinite(beta) && beta > 0.0, "step size: beta must be positive");
  return StepSizeSchedule(beta, {});
}

StepSizeSchedule StepSizeSchedule::custom(std::vector<double> values) {
  require(!values.empty(), "step size: empty sequence");
  for (std::size_t k = 0; k < values.size(); ++k) {
    require(std::isfinite(values[k]) && values[k] > 0.0,
            "step size: c(" + std::to_string(k) + ") must be positive");
    require(k == 0 || values[k] <= values[k - 1],
            "step size: sequence must be non-increasing at k=" + std::to_string(k));
  }
  return StepSizeSchedule(0.0, std::move(values));
}

double StepSizeSchedule::operator()(std::size_t k) const {
  if (values_.empty()) return beta_ / static_cast<double>(k + 1);
  return values_[std::min(k, values_.size() - 1)];
}

void RunConfig::validate() const {
  require(iterations >= 1, "run: need at least one iteration");
  require(std::isfinite(refresh_threshold) && refresh_threshold > 0.0,
          "run: refresh threshold must be positive");
  require(!refresh_window || *refresh_window >= 1, "run: refresh window must be at least 1");
  require(threads >= 1, "run: need at least one thread");
}

Vector dual_update(const Vector& mixed, double step, const Vector& g_value) {
  require(mixed.size() == g_value.size(), "dual update: dimension mismatch");
  require(step > 0.0, "dual update: step must be positive");
  return (mixed + step * g_value).cwiseMax(0.0);
}

Vector primal_average_update(const Vector& x_hat, const Vector& x_new, double c_k,
                             double c_cumulative) {
  require(x_hat.size() == x_new.size(), "average update: dimension mismatch");
  if (!(c_cumulative > 0.0)) throw ValidationError("average update: cumulative step must be positive");
  return x_hat + (c_k / c_cumulative) * (x_new - x_hat);
}

void refresh_update(AgentState& state, std::size_t k, const Vector& x_new, double c_k,
                    double e_norm, double threshold, std::size_t window) {
  state.consecutive_below = e_norm < threshold ? state.consecutive_below + 1 : 0;
  if (state.k_s) {
    state.c_sum_since_refresh += c_k;
    state.x_tilde = primal_average_update(state.x_tilde, x_new, c_k, state.c_sum_since_refresh);
    return;
  }
  if (state.consecutive_below >= window) {
    state.k_s = k;
    state.c_sum_since_refresh = c_k;
    state.x_tilde = x_new;
    return;
  }
  state.x_tilde = state.x_hat;
}

Engine::Engine(const CoupledProblem& problem, const WeightSchedule& schedule, RunConfig config)
    : problem_(problem), schedule_(schedule), config_(std::move(config)) {
  config_.validate();
  require(schedule_.num_agents() == problem_.num_agents(),
          "engine: schedule size does not match the number of agents");
  window_ = config_.refresh_window.value_or(problem_.num_agents());
}

void Engine::initialize(std::optional<Matrix> initial_lambda) {
  const std::size_t m = problem_.num_agents();
  const Index p = problem_.coupling_dim();
  if (initial_lambda) {
    require(initial_lambda->rows() == static_cast<Index>(m) && initial_lambda->cols() == p,
            "engine: initial multipliers must be m x p");
    require(initial_lambda->allFinite() && (p == 0 || initial_lambda->minCoeff() >= 0.0),
            "engine: initial multipliers must be nonnegative");
  }
  states_.assign(m, AgentState{});
  e_norm_sq_.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    auto& s = states_[i];
    s.lambda = initial_lambda ? Vector(initial_lambda->row(static_cast<Index>(i)).transpose())
                              : Vector(Vector::Zero(p));
    s.mixed = s.lambda;
    try {
      s.x = local_argmin(problem_.agent(i), Vector::Zero(p));
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("agent " + std::to_string(i) + " at initialization: " + e.what());
    }
    s.x_hat = s.x;
    s.x_tilde = s.x;
  }
  k_ = 0;
  c_cumulative_ = 0.0;
  initialized_ = true;
}

Matrix Engine::multipliers() const {
  Matrix out(static_cast<Index>(states_.size()), problem_.coupling_dim());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    out.row(static_cast<Index>(i)) = states_[i].lambda.transpose();
  }
  return out;
}

void Engine::advance_agent(std::size_t i, const Vector& mixed, const Vector& average, double c_k,
                           double c_cumulative, double& phi_gap) {
  const AgentProblem& agent = problem_.agent(i);
  AgentState& s = states_[i];
  s.mixed = mixed;
  s.x = local_argmin(agent, mixed);
  const Vector g = eval_coupling(agent, s.x);
  const Vector next = dual_update(mixed, c_k, g);
  const double e_norm = (next - mixed).norm();
  s.lambda = next;
  s.last_e_norm = e_norm;
  e_norm_sq_[i] = e_norm * e_norm;
  s.x_hat = primal_average_update(s.x_hat, s.x, c_k, c_cumulative);
  refresh_update(s, k_, s.x, c_k, e_norm, config_.refresh_threshold, window_);

  if (config_.diagnostics == DiagnosticsLevel::Full) {
    const double phi_mixed = agent.objective.value(s.x) + mixed.dot(g);
    const double phi_avg = eval_dual_function(agent, average).value;
    phi_gap = std::abs(phi_mixed - phi_avg);
  } else {
    phi_gap = kNaN;
  }
}

IterationRecord Engine::step() {
  if (!initialized_) initialize();
  const std::size_t m = problem_.num_agents();
  const Index p = problem_.coupling_dim();

  const Matrix current = multipliers();
  const Matrix mixed = p > 0 ? mix(schedule_, k_, current) : current;
  const Vector average = m > 0 ? Vector(current.colwise().mean().transpose()) : Vector(p);
  const double c_k = config_.step_size(k_);
  c_cumulative_ += c_k;

  std::vector<double> gaps(m, 0.0);
  std::vector<std::exception_ptr> errors(m);
  auto work = [&](std::size_t i) {
    try {
      advance_agent(i, mixed.row(static_cast<Index>(i)).transpose(), average, c_k, c_cumulative_,
                    gaps[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min(config_.threads, m);
  if (workers <= 1) {
    for (std::size_t i = 0; i < m; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < m; i += workers) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!errors[i]) continue;
    const std::string where = "agent " + std::to_string(i) + " at iteration " + std::to_string(k_);
    try {
      std::rethrow_exception(errors[i]);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(where + ": " + e.what());
    } catch (const SolverError& e) {
      throw SolverError(where + ": " + e.what());
    }
  }
  ++k_;

  IterationRecord rec;
  rec.k = k_;
  rec.step_size = c_k;
  std::vector<Vector> hat(m);
  std::vector<Vector> tilde(m);
  for (std::size_t i = 0; i < m; ++i) {
    hat[i] = states_[i].x_hat;
    tilde[i] = states_[i].x_tilde;
  }
  rec.obj_hat = problem_.objective(hat);
  rec.obj_tilde = problem_.objective(tilde);
  rec.viol_hat = problem_.coupling(hat).cwiseMax(0.0);
  rec.viol_tilde = problem_.coupling(tilde).cwiseMax(0.0);
  rec.viol_hat_max = p > 0 ? rec.viol_hat.maxCoeff() : 0.0;
  rec.viol_tilde_max = p > 0 ? rec.viol_tilde.maxCoeff() : 0.0;

  const Matrix lambdas = multipliers();
  rec.v = m > 0 ? Vector(lambdas.colwise().mean().transpose()) : Vector(p);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = (states_[i].lambda - rec.v).norm();
    rec.dual_disagreement = std::max(rec.dual_disagreement, d);
    rec.sum_disagreement += d;
    rec.sum_e_sq += e_norm_sq_[i];
    rec.max_e_norm = std::max(rec.max_e_norm, states_[i].last_e_norm);
    rec.max_lambda_norm = std::max(rec.max_lambda_norm, states_[i].lambda.norm());
  }
  if (config_.diagnostics == DiagnosticsLevel::Full) {
    rec.dual_gap = 0.0;
    for (double g : gaps) rec.dual_gap += g;
  } else {
    rec.dual_gap = kNaN;
  }
  if (reference_ != nullptr) {
    rec.dual_dist_to_ref = 0.0;
    for (const auto& s : states_) {
      rec.dual_dist_to_ref = std::max(rec.dual_dist_to_ref, (s.lambda - reference_->lambda_star).norm());
    }
    rec.primal_gap_hat = std::abs(rec.obj_hat - reference_->f_star);
    rec.primal_gap_tilde = std::abs(rec.obj_tilde - reference_->f_star);
  } else {
    rec.dual_dist_to_ref = kNaN;
    rec.primal_gap_hat = kNaN;
    rec.primal_gap_tilde = kNaN;
  }
  return rec;
}

RunTrace Engine::run(const std::optional<CentralizedReference>& reference) {
  if (!initialized_) initialize();
  if (reference) {
    require(reference->lambda_star.size() == problem_.coupling_dim(),
            "engine: reference multiplier has the wrong dimension");
  }
  reference_ = reference ? &*reference : nullptr;
  const bool full = config_.diagnostics == DiagnosticsLevel::Full || config_.record_history;
  const std::size_t m = problem_.num_agents();

  RunTrace trace;
  trace.m = m;
  trace.p = problem_.coupling_dim();
  trace.seed = config_.seed;
  trace.has_reference = reference.has_value();
  trace.f_star = reference ? reference->f_star : kNaN;
  trace.initial_step = config_.step_size(k_);
  trace.records.reserve(config_.iterations);
  for (const auto& s : states_) trace.initial_lambda_norms.push_back(s.lambda.norm());
  auto stacked_hat = [&] {
    std::vector<Vector> blocks;
    for (const auto& s : states_) blocks.push_back(s.x_hat);
    return problem_.stack(blocks);
  };
  if (full) {
    trace.multipliers.push_back(multipliers());
    trace.x_hat_history.push_back(stacked_hat());
  }

  try {
    for (std::size_t r = 0; r < config_.iterations; ++r) {
      trace.records.push_back(step());
      if (r == 0) {
        for (const auto& s : states_) trace.initial_e_norms.push_back(s.last_e_norm);
      }
      if (full) {
        trace.multipliers.push_back(multipliers());
        trace.x_hat_history.push_back(stacked_hat());
      }
      if (config_.stop_when_converged &&
          std::all_of(states_.begin(), states_.end(), [](const AgentState& s) { return s.k_s.has_value(); }) &&
          trace.records.back().dual_disagreement < config_.refresh_threshold) {
        break;
      }
    }
  } catch (...) {
    reference_ = nullptr;
    throw;
  }
  reference_ = nullptr;

  for (std::size_t i = 0; i < m; ++i) {
    trace.refresh_index.push_back(states_[i].k_s);
    trace.final_x_hat.push_back(states_[i].x_hat);
    trace.final_x_tilde.push_back(states_[i].x_tilde);
  }
  trace.final_lambda = multipliers();
  return trace;
}

RunTrace run(const CoupledProblem& problem, const WeightSchedule& schedule,
             const RunConfig& config, const std::optional<CentralizedReference>& reference) {
  Engine engine(problem, schedule, config);
  return engine.run(reference);
}

}  // namespace dualdec
