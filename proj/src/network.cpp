#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "dualdec/network.hpp"

namespace dualdec {

namespace {

constexpr double kSumTol = 1e-9;

void check_edges(std::size_t m, const std::vector<Edge>& edges) {
  for (const auto& e : edges) {
    require(e.u < m && e.v < m, "network: edge references agent outside [0, m)");
    require(e.u != e.v, "network: self loops are implicit, do not list them");
  }
}

double min_nonzero(const Matrix& a) {
  double lo = 1.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) > 0.0) lo = std::min(lo, a(i, j));
    }
  }
  return lo;
}

Matrix lazy_if_needed(Matrix a, double eta) {
  const double diag = a.rows() > 0 ? a.diagonal().minCoeff() : 1.0;
  if (diag >= eta || eta <= 0.0) return a;
  require(eta < 1.0, "network: eta must be below 1");
  const double t = (eta - diag) / (1.0 - diag);
  const Index m = a.rows();
  return (1.0 - t) * a + t * Matrix::Identity(m, m);
}

}  // namespace

WeightSchedule::WeightSchedule(std::vector<Matrix> matrices, double eta, std::size_t window)
    : matrices_(std::move(matrices)), eta_(eta), window_(window) {
  require(!matrices_.empty(), "schedule: at least one matrix required");
  const Index m = matrices_.front().rows();
  require(m >= 1, "schedule: empty matrix");
  for (const auto& a : matrices_) {
    require(a.rows() == m && a.cols() == m, "schedule: matrices must all be m x m");
    require(a.allFinite(), "schedule: non-finite weight");
  }
  require(window_ >= 1, "schedule: T must be at least 1");
}

Matrix metropolis_weights(std::size_t m, const std::vector<Edge>& edges) {
  check_edges(m, edges);
  const Index n = static_cast<Index>(m);
  std::vector<std::vector<bool>> linked(m, std::vector<bool>(m, false));
  for (const auto& e : edges) linked[e.u][e.v] = linked[e.v][e.u] = true;
  std::vector<std::size_t> degree(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    degree[i] = static_cast<std::size_t>(std::count(linked[i].begin(), linked[i].end(), true));
  }
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!linked[i][j]) continue;
      a(static_cast<Index>(i), static_cast<Index>(j)) =
          1.0 / (1.0 + static_cast<double>(std::max(degree[i], degree[j])));
    }
  }
  for (Index i = 0; i < n; ++i) a(i, i) = 1.0 - (a.row(i).sum() - a(i, i));
  return a;
}

Matrix sinkhorn_balance(Matrix weights, double tol, std::size_t max_sweeps) {
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    const Vector rows = weights.rowwise().sum();
    const Vector cols = weights.colwise().sum().transpose();
    const double err = std::max((rows.array() - 1.0).abs().maxCoeff(),
                                (cols.array() - 1.0).abs().maxCoeff());
    if (err <= tol) return weights;
    weights = rows.cwiseInverse().asDiagonal() * weights;
    const Vector cols2 = weights.colwise().sum().transpose();
    weights = weights * cols2.cwiseInverse().asDiagonal();
  }
  throw SolverError("sinkhorn balancing did not converge");
}

WeightSchedule static_metropolis_schedule(std::size_t m, const std::vector<Edge>& edges,
                                          double eta) {
  require(m >= 1, "network: need at least one agent");
  require(is_connected(m, edges), "network: graph is not connected");
  Matrix a = sinkhorn_balance(lazy_if_needed(metropolis_weights(m, edges), eta));
  const double realized = min_nonzero(a);
  return WeightSchedule({std::move(a)}, realized, 1);
}

WeightSchedule alternating_partition_schedule(std::size_t m, const std::vector<Edge>& edges_a,
                                              const std::vector<Edge>& edges_b, double eta) {
  require(m >= 2, "network: alternating schedule needs m >= 2");
  check_edges(m, edges_a);
  check_edges(m, edges_b);
  std::vector<Edge> all = edges_a;
  all.insert(all.end(), edges_b.begin(), edges_b.end());
  require(is_connected(m, all), "network: union of the edge groups is not connected");

  auto same = [](const std::vector<Edge>& x, const std::vector<Edge>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const bool direct = x[k].u == y[k].u && x[k].v == y[k].v;
      const bool flipped = x[k].u == y[k].v && x[k].v == y[k].u;
      if (!direct && !flipped) return false;
    }
    return true;
  };

  std::vector<Matrix> phases;
  phases.push_back(sinkhorn_balance(lazy_if_needed(metropolis_weights(m, edges_a), eta)));
  if (!edges_b.empty() && !same(edges_a, edges_b)) {
    phases.push_back(sinkhorn_balance(lazy_if_needed(metropolis_weights(m, edges_b), eta)));
  }
  double realized = 1.0;
  for (const auto& a : phases) realized = std::min(realized, min_nonzero(a));
  const std::size_t window = phases.size();
  return WeightSchedule(std::move(phases), realized, window);
}

std::size_t strongly_connected_components(const std::vector<std::vector<bool>>& adjacency,
                                          std::vector<std::size_t>* component) {
  // Tarjan. Link j -> i when adjacency[i][j].
  const std::size_t m = adjacency.size();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(m, unvisited), low(m, 0), comp(m, 0);
  std::vector<bool> on_stack(m, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;
  std::size_t count = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w = 0; w < m; ++w) {
      if (w == v || !adjacency[w][v]) continue;
      if (index[w] == unvisited) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        const std::size_t w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = count;
        if (w == v) break;
      }
      ++count;
    }
  };
  for (std::size_t v = 0; v < m; ++v) {
    if (index[v] == unvisited) visit(v);
  }
  if (component) *component = comp;
  return count;
}

bool is_connected(std::size_t m, const std::vector<Edge>& edges) {
  if (m == 0) return false;
  std::vector<std::vector<bool>> adjacency(m, std::vector<bool>(m, false));
  for (const auto& e : edges) {
    if (e.u >= m || e.v >= m) return false;
    adjacency[e.u][e.v] = adjacency[e.v][e.u] = true;
  }
  return strongly_connected_components(adjacency) == 1;
}

GraphReport validate_schedule(const WeightSchedule& schedule, std::size_t horizon) {
  GraphReport report;
  const std::size_t m = schedule.num_agents();
  const std::size_t window = schedule.window();
  const double eta = schedule.eta();
  horizon = std::max(horizon, window * m);
  constexpr std::size_t npos = ScheduleViolation::npos;
  auto flag = [&](bool& field, std::size_t k, std::size_t i, std::size_t j, std::string why) {
    field = false;
    report.violations.push_back({k, i, j, std::move(why)});
  };

  if (!(eta > 0.0 && eta < 1.0) && m > 1) {
    flag(report.eta_ok, npos, npos, npos, "declared eta outside (0, 1)");
  }

  const std::size_t distinct = std::min(horizon, schedule.period());
  for (std::size_t k = 0; k < distinct; ++k) {
    const Matrix& a = schedule.at(k);
    std::vector<std::size_t> bad_rows;
    std::vector<std::size_t> bad_cols;
    for (std::size_t i = 0; i < m; ++i) {
      const double row = a.row(static_cast<Index>(i)).sum();
      if (std::abs(row - 1.0) > kSumTol) {
        bad_rows.push_back(i);
        flag(report.doubly_stochastic_ok, k, i, npos,
             "row sum " + std::to_string(row) + " differs from 1");
      }
      const double col = a.col(static_cast<Index>(i)).sum();
      if (std::abs(col - 1.0) > kSumTol) {
        bad_cols.push_back(i);
        flag(report.doubly_stochastic_ok, k, npos, i,
             "column sum " + std::to_string(col) + " differs from 1");
      }
    }
    if (bad_rows.size() == 1 && bad_cols.size() == 1) {
      flag(report.doubly_stochastic_ok, k, bad_rows[0], bad_cols[0],
           "single entry breaks its row and column sums");
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double w = a(static_cast<Index>(i), static_cast<Index>(j));
        if (i == j) {
          if (w < eta - 1e-12 && m > 1) flag(report.self_weight_ok, k, i, j, "self weight below eta");
          if (w < 0.0 || w > 1.0 + 1e-12) flag(report.eta_ok, k, i, j, "weight outside [0, 1]");
          continue;
        }
        if (w < 0.0 || w >= 1.0) {
          flag(report.eta_ok, k, i, j, "weight outside [0, 1)");
        } else if (w > 0.0 && w < eta - 1e-12) {
          flag(report.eta_ok, k, i, j, "nonzero weight below eta");
        }
      }
    }
  }

  // Union graph over the horizon.
  std::vector<std::vector<bool>> union_links(m, std::vector<bool>(m, false));
  const std::size_t horizon_period_span = std::min(horizon, schedule.period());
  for (std::size_t k = 0; k < horizon_period_span; ++k) {
    const Matrix& a = schedule.at(k);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j && a(static_cast<Index>(i), static_cast<Index>(j)) > 0.0) {
          union_links[i][j] = true;
        }
      }
    }
  }
  std::vector<std::size_t> component;
  const std::size_t count = strongly_connected_components(union_links, &component);
  if (count > 1) {
    std::vector<std::size_t> sizes(count, 0);
    for (auto c : component) ++sizes[c];
    std::size_t main = component[0];
    for (std::size_t i = 0; i < m; ++i) {
      if (sizes[component[i]] > sizes[main]) main = component[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (component[i] != main) {
        flag(report.strongly_connected_ok, npos, i, npos,
             "agent not strongly connected to the rest of the network");
      }
    }
  }

  // T-recurrence of links active in the second half of the horizon.
  const std::size_t half = horizon / 2;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j || !union_links[i][j]) continue;
      std::vector<std::size_t> active;
      for (std::size_t k = 0; k < horizon; ++k) {
        if (schedule.at(k)(static_cast<Index>(i), static_cast<Index>(j)) > 0.0) active.push_back(k);
      }
      if (active.empty() || active.back() < half) continue;
      std::size_t previous_end = 0;  // first iteration not yet covered
      bool link_ok = true;
      for (std::size_t k : active) {
        if (k >= previous_end + window) {
          flag(report.T_recurrence_ok, previous_end, i, j, "link absent for more than T iterations");
          link_ok = false;
          break;
        }
        previous_end = k + 1;
      }
      if (link_ok && horizon >= previous_end + window) {
        flag(report.T_recurrence_ok, previous_end, i, j, "link absent for more than T iterations");
      }
    }
  }
  return report;
}

Matrix mix(const WeightSchedule& schedule, std::size_t k, const Matrix& estimates) {
  const Matrix& a = schedule.at(k);
  require(estimates.rows() == a.rows(), "mix: one estimate row per agent required");
  require(estimates.size() == 0 || estimates.minCoeff() >= 0.0, "mix: estimates must be nonnegative");
  return a * estimates;
}

std::vector<Edge> random_geometric_graph(std::size_t m, std::uint64_t seed) {
  if (m <= 1) return {};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, double>> points(m);
  for (auto& p : points) {
    p.first = unit(rng);
    p.second = unit(rng);
  }
  double radius = std::sqrt(std::log(static_cast<double>(m) + 1.0) / static_cast<double>(m));
  while (true) {
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < m; ++u) {
      for (std::size_t v = u + 1; v < m; ++v) {
        const double dx = points[u].first - points[v].first;
        const double dy = points[u].second - points[v].second;
        if (std::hypot(dx, dy) <= radius) edges.push_back({u, v});
      }
    }
    if (is_connected(m, edges)) return edges;
    radius *= 1.1;
  }
}

std::pair<std::vector<Edge>, std::vector<Edge>> split_alternating(const std::vector<Edge>& edges) {
  std::pair<std::vector<Edge>, std::vector<Edge>> out;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    (k % 2 == 0 ? out.first : out.second).push_back(edges[k]);
  }
  return out;
}

}  // namespace dualdec
