#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "campsched/instance.hpp"
#include "campsched/schedule.hpp"

namespace campsched {

inline constexpr double kPeakTariff = 0.005;  // $ per kW^2 of the horizon's maximum load

struct CostBreakdown {
  double energy_cost = 0.0;
  double peak_cost = 0.0;
  double once_off_reward = 0.0;
  double total = 0.0;
  double peak_kw = 0.0;
};

/// Total load l_t in kW: base load, running activities and battery grid effects.
/// The schedule's entries must follow the instance's activity order.
std::vector<double> total_load(const Instance& instance, const Schedule& schedule);
SeriesFrame total_load_series(const Instance& instance, const Schedule& schedule);

/// Adds the draw of every scheduled activity to `load` (no base load, no batteries).
void add_activity_load(const Instance& instance, const Schedule& schedule, std::span<double> load);

/// Adds each battery's grid effect; an empty action table adds nothing.
void add_battery_load(const Instance& instance, const Schedule& schedule, std::span<double> load);

/// sum_t 0.25 * l_t * e_t / 1000.
double energy_cost(std::span<const double> load, std::span<const double> price);

/// Energy plus squared peak tariff; the square is charged even when the peak is negative.
double energy_and_peak_cost(std::span<const double> load, std::span<const double> price);

/// sum_i d_i * (value_i - o_i * penalty_i) over once-off activities.
double once_off_reward(const Instance& instance, const Schedule& schedule);

CostBreakdown schedule_cost(const Instance& instance, const Schedule& schedule, std::span<const double> load);

/// Convenience: total_load followed by schedule_cost.
CostBreakdown evaluate_schedule(const Instance& instance, const Schedule& schedule);

/// The in-sample seasonal naive error is zero, so MASE is undefined.
class ZeroScaleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mean absolute scaled error of `forecast` against `actual`, scaled by the seasonal
/// naive error of `training` at lag `season_length`.
double mase(std::span<const double> forecast, std::span<const double> actual, std::span<const double> training,
            int season_length);
double mase(const SeriesFrame& forecast, const SeriesFrame& actual, const SeriesFrame& training, int season_length);

}  // namespace campsched
