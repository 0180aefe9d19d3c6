#ifndef DUALDEC_NETWORK_HPP_
#define DUALDEC_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dualdec/types.hpp"

namespace dualdec {

/// Undirected communication link between agents u and v.
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
};

/**
 * Periodic sequence of m x m mixing matrices A(k) = matrices[k mod period].
 *
 * Entry (i, j) is the weight agent i gives to the estimate of agent j, so
 * the directed link j -> i is active at k iff A(k)(i, j) > 0.
 */
class WeightSchedule {
 public:
  /// `eta` is the declared lower bound on self and nonzero weights and
  /// `window` the declared communication window T.
  WeightSchedule(std::vector<Matrix> matrices, double eta, std::size_t window);

  std::size_t num_agents() const { return static_cast<std::size_t>(matrices_.front().rows()); }
  std::size_t period() const { return matrices_.size(); }
  const Matrix& at(std::size_t k) const { return matrices_[k % matrices_.size()]; }
  const std::vector<Matrix>& matrices() const { return matrices_; }
  double eta() const { return eta_; }
  std::size_t window() const { return window_; }

 private:
  std::vector<Matrix> matrices_;
  double eta_;
  std::size_t window_;
};

struct ScheduleViolation {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t k = npos;
  std::size_t i = npos;
  std::size_t j = npos;
  std::string reason;
};

struct GraphReport {
  bool doubly_stochastic_ok = true;
  bool self_weight_ok = true;
  bool eta_ok = true;
  bool strongly_connected_ok = true;
  bool T_recurrence_ok = true;
  std::vector<ScheduleViolation> violations;

  bool admissible() const {
    return doubly_stochastic_ok && self_weight_ok && eta_ok && strongly_connected_ok &&
           T_recurrence_ok;
  }
};

/// Metropolis weights 1 / (1 + max(deg u, deg v)) on each edge, remainder on
/// the diagonal. Symmetric and doubly stochastic.
Matrix metropolis_weights(std::size_t m, const std::vector<Edge>& edges);

/// Alternating row/column normalisation until both sums are within `tol` of 1.
Matrix sinkhorn_balance(Matrix weights, double tol = 1e-12, std::size_t max_sweeps = 10000);

/// Constant Metropolis schedule (period 1, T = 1) on a connected graph. If a
/// diagonal entry falls below `eta` the matrix is made lazy, (1-t) A + t I.
/// The realized minimum nonzero weight is reported as the schedule's eta.
WeightSchedule static_metropolis_schedule(std::size_t m, const std::vector<Edge>& edges,
                                          double eta = 0.0);

/// Two edge groups activated alternately (period 2, T = 2). An empty or
/// identical second group gives period 1, T = 1.
WeightSchedule alternating_partition_schedule(std::size_t m, const std::vector<Edge>& edges_a,
                                              const std::vector<Edge>& edges_b,
                                              double eta = 0.0);

/// Checks the weight and connectivity conditions over iterations [0, horizon).
/// Entry conditions are checked on each distinct matrix; connectivity uses the
/// union of links over the horizon and T-recurrence uses links present in its
/// second half. horizon is raised to at least T * m. Never throws on violations.
GraphReport validate_schedule(const WeightSchedule& schedule, std::size_t horizon);

/// Step 6 for all agents: row i of the result is sum_j A(k)(i, j) lambda_j.
Matrix mix(const WeightSchedule& schedule, std::size_t k, const Matrix& estimates);

/// Number of strongly connected components of the directed graph with link
/// j -> i whenever adjacency(i, j) is true (i != j).
std::size_t strongly_connected_components(const std::vector<std::vector<bool>>& adjacency,
                                          std::vector<std::size_t>* component = nullptr);

bool is_connected(std::size_t m, const std::vector<Edge>& edges);

/// m points uniform in the unit square joined when closer than a radius that
/// grows until the graph is connected.
std::vector<Edge> random_geometric_graph(std::size_t m, std::uint64_t seed);

/// Splits edges by position parity into two groups.
std::pair<std::vector<Edge>, std::vector<Edge>> split_alternating(const std::vector<Edge>& edges);

}  // namespace dualdec

#endif  // DUALDEC_NETWORK_HPP_
