#include "dualdec/pev.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace dualdec {

namespace {

void require_range(const std::pair<double, double>& r, const char* name, bool allow_zero = false) {
  require(std::isfinite(r.first) && std::isfinite(r.second) && r.first <= r.second &&
              (allow_zero ? r.first >= 0.0 : r.first > 0.0),
          std::string("pev: invalid range for ") + name);
}

}  // namespace

void PevConfig::validate() const {
  require(m >= 1, "pev: need at least one vehicle");
  require(slots >= 1, "pev: need at least one slot");
  require(slot_hours > 0.0, "pev: slot length must be positive");
  require_range(rated_power_kw, "rated power");
  require_range(battery_kwh, "battery capacity");
  require_range(initial_soc, "initial state of charge", true);
  require(initial_soc.second < 1.0, "pev: initial state of charge must stay below 1");
  require_range(required_share, "required share");
  require(required_share.second < 1.0, "pev: required share must stay below 1");
  require_range(efficiency, "efficiency");
  require(efficiency.second <= 1.0, "pev: efficiency above 1");
  require_range(price_per_kwh, "price");
  require(price_jitter >= 0.0 && price_jitter < 1.0, "pev: price jitter must be in [0,1)");
  require(vehicle_jitter >= 0.0 && vehicle_jitter < 1.0, "pev: vehicle jitter must be in [0,1)");
  require(network_upper > 0.0 && network_lower >= 0.0 && network_lower < network_upper,
          "pev: network limits must satisfy 0 <= lower < upper");
  require(max_attempts >= 1, "pev: need at least one attempt");
  require(widen_factor > 1.0, "pev: widen factor must exceed 1");
}

PevInstance generate_pev(const PevConfig& config) {
  config.validate();
  const std::size_t m = config.m;
  const auto S = static_cast<Index>(config.slots);
  const Index p = 2 * S;
  const double mean_power = 0.5 * (config.rated_power_kw.first + config.rated_power_kw.second);

  double upper = config.network_upper;
  double lower = config.network_lower;
  for (std::size_t attempt = 1; attempt <= config.max_attempts; ++attempt) {
    std::mt19937_64 rng(config.seed);
    auto uniform = [&rng](const std::pair<double, double>& r) {
      return std::uniform_real_distribution<double>(r.first, r.second)(rng);
    };
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // Evening peak, night trough, morning rise.
    Vector price(S);
    for (Index s = 0; s < S; ++s) {
      const double phase = S > 1 ? static_cast<double>(s) / static_cast<double>(S - 1) : 0.5;
      const double shape = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * phase));
      const double base = config.price_per_kwh.first +
                          (config.price_per_kwh.second - config.price_per_kwh.first) * shape;
      price(s) = base * (1.0 + config.price_jitter * unit(rng));
    }

    std::vector<AgentProblem> agents;
    std::vector<PevVehicle> vehicles;
    agents.reserve(m);
    // Per-vehicle constant rates: the final-charge floor and the tightest cap.
    std::vector<double> floor_rate;
    std::vector<double> cap_rate;
    std::vector<double> shares;
    for (std::size_t i = 0; i < m; ++i) {
      PevVehicle v;
      v.rated_kw = uniform(config.rated_power_kw);
      v.battery_kwh = uniform(config.battery_kwh);
      v.initial_kwh = uniform(config.initial_soc) * v.battery_kwh;
      v.efficiency = uniform(config.efficiency);
      const double slot_energy = v.efficiency * v.rated_kw * config.slot_hours;
      const double needed_slots = uniform(config.required_share) * static_cast<double>(S);
      v.required_kwh = v.initial_kwh + needed_slots * slot_energy;
      if (v.required_kwh > 0.95 * v.battery_kwh) v.battery_kwh = v.required_kwh / 0.95;
      const double headroom_slots = (v.battery_kwh - v.initial_kwh) / slot_energy;

      Vector cost(S);
      for (Index s = 0; s < S; ++s) {
        const double own = price(s) * (1.0 + config.vehicle_jitter * unit(rng));
        cost(s) = own * v.rated_kw * config.slot_hours;
      }

      // Cumulative charge stays within the battery, final charge reaches the target.
      Matrix C = Matrix::Zero(S + 1, S);
      Vector d(S + 1);
      for (Index s = 0; s < S; ++s) {
        C.row(s).head(s + 1).setOnes();
        d(s) = headroom_slots;
      }
      C.row(S).setConstant(-1.0);
      d(S) = -needed_slots;

      Matrix A = Matrix::Zero(p, S);
      const double share = v.rated_kw / mean_power;
      for (Index s = 0; s < S; ++s) {
        A(s, s) = share;
        A(S + s, s) = -share;
      }
      Vector b(p);
      b.head(S).setConstant(upper);
      b.tail(S).setConstant(-lower);

      floor_rate.push_back(needed_slots / static_cast<double>(S));
      cap_rate.push_back(std::min(headroom_slots, static_cast<double>(S)) / static_cast<double>(S));
      shares.push_back(share);

      agents.emplace_back(ObjectiveForm::linear(cost), CouplingMap{A, b},
                          Polytope{C, d, Vector::Zero(S), Vector::Ones(S)});
      vehicles.push_back(v);
    }

    // Candidate witness: floor plus a common fraction of each vehicle's
    // headroom, using half of the aggregate slack below the upper limit.
    double base = 0.0;
    double extra = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      base += shares[i] * floor_rate[i];
      extra += shares[i] * (cap_rate[i] - floor_rate[i]);
    }
    const double theta =
        extra > 0.0 ? std::min(0.5, 0.5 * (upper * static_cast<double>(m) - base) / extra) : 0.0;
    Vector plan(static_cast<Index>(m) * S);
    for (std::size_t i = 0; i < m; ++i) {
      plan.segment(static_cast<Index>(i) * S, S)
          .setConstant(floor_rate[i] + theta * (cap_rate[i] - floor_rate[i]));
    }

    CoupledProblem problem(std::move(agents), p);
    const SlaterReport slater = check_slater(problem, &plan);
    if (!slater.holds) {
      upper *= config.widen_factor;
      lower /= config.widen_factor;
      continue;
    }
    const double md = static_cast<double>(m);
    PevInstance out{std::move(problem), std::move(vehicles), price,
                    Vector::Constant(S, upper * md), Vector::Constant(S, lower * md),
                    attempt, static_cast<std::size_t>(S + 1 + 2 * S), slater.margin};
    return out;
  }
  throw InfeasibleError("pev: no Slater point after " + std::to_string(config.max_attempts) +
                        " attempts");
}

}  // namespace dualdec
