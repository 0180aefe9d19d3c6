#ifndef DUALDEC_PEV_HPP_
#define DUALDEC_PEV_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "dualdec/problem.hpp"

namespace dualdec {

/// Overnight fleet-charging benchmark parameters. Decisions are per-unit:
/// x_i(s) in [0, 1] is the fraction of vehicle i's rated power used in slot s.
struct PevConfig {
  std::size_t m = 20;
  std::size_t slots = 24;
  double slot_hours = 1.0 / 3.0;
  std::uint64_t seed = 1;

  std::pair<double, double> rated_power_kw{3.0, 5.0};
  std::pair<double, double> battery_kwh{20.0, 40.0};
  std::pair<double, double> initial_soc{0.2, 0.5};   ///< fraction of battery
  std::pair<double, double> required_share{0.25, 0.5};  ///< full-power slots needed, / slots
  std::pair<double, double> efficiency{0.85, 0.95};
  std::pair<double, double> price_per_kwh{0.08, 0.22};  ///< evening peak to night trough
  double price_jitter = 0.05;    ///< relative per-slot noise on the profile
  double vehicle_jitter = 0.02;  ///< relative per-vehicle noise on prices

  /// Aggregate limits per slot in units of an average vehicle's rating, per vehicle.
  double network_upper = 0.5;
  double network_lower = 0.05;

  std::size_t max_attempts = 10;
  double widen_factor = 1.1;

  void validate() const;
};

struct PevVehicle {
  double rated_kw = 0.0;
  double battery_kwh = 0.0;
  double initial_kwh = 0.0;
  double required_kwh = 0.0;
  double efficiency = 0.0;
};

struct PevInstance {
  CoupledProblem problem;
  std::vector<PevVehicle> vehicles;
  Vector price;  ///< per-slot base profile (per kWh)
  Vector upper_limit;  ///< aggregate per-unit upper limit per slot
  Vector lower_limit;
  std::size_t attempts = 0;
  /// Inequalities describing one X_i, box bounds included.
  std::size_t local_inequalities = 0;
  double slater_margin = 0.0;
};

/// Seeded random instance with linear costs, cumulative state-of-charge limits,
/// a required final charge and two-sided aggregate power limits per slot (p =
/// 2 * slots). If the coupled program has no Slater point the network limits
/// are widened and the instance redrawn; throws InfeasibleError after
/// `max_attempts`.
PevInstance generate_pev(const PevConfig& config);

}  // namespace dualdec

#endif  // DUALDEC_PEV_HPP_
