#pragma once

#include <span>
#include <vector>

#include "campsched/instance.hpp"
#include "campsched/schedule.hpp"

namespace campsched {

struct DispatchPlan {
  std::vector<std::vector<BatteryAction>> actions;  // [battery][slot]
  std::vector<std::vector<double>> soc;             // kWh after each slot
  SeriesFrame resulting_load;
  double cost = 0.0;  // energy plus peak tariff of resulting_load
};

/// Exact minimiser of energy plus peak tariff over every charge/hold/discharge sequence
/// of one battery against `residual` (kW), starting empty.
std::vector<BatteryAction> single_battery_best_response(const Battery& battery, std::span<const double> residual,
                                                        std::span<const double> price);

/// State of charge after each slot; throws std::invalid_argument when a sequence leaves
/// the lattice.
std::vector<double> soc_trajectory(const Battery& battery, std::span<const BatteryAction> actions);

/// Coordinate descent over batteries from all-hold, at most `max_rounds` rounds. The
/// batteries are visited in order of their solo best-response cost, so the result is
/// never worse than all-hold or than the best single-battery plan.
DispatchPlan optimize_dispatch(const Instance& instance, const SeriesFrame& activity_load, int max_rounds = 10);

/// Exhaustive search over joint action sequences; refuses more than 7 slots or more
/// than 3^14 combinations.
DispatchPlan brute_force_dispatch(std::span<const Battery> batteries, std::span<const double> load,
                                  std::span<const double> price);

}  // namespace campsched
