#include "campsched/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace campsched {

bool outside_working_hours(const Horizon& horizon, int start, int duration) noexcept {
  for (int t = start; t < start + duration; ++t) {
    if (!horizon.is_working_slot(t)) return true;
  }
  return false;
}

void add_activity_load(const Instance& instance, const Schedule& schedule, std::span<double> load) {
  const Horizon& h = instance.horizon;
  std::size_t rec = 0;
  std::size_t once = 0;
  for (const Activity& a : instance.activities) {
    if (a.is_recurring()) {
      if (rec >= schedule.recurring.size()) continue;
      const RecurringAssignment& r = schedule.recurring[rec++];
      for (int week = 0; week < kRecurringWeeks; ++week) {
        const int s = recurring_start_slot(h, r.weekday, r.start_slot_of_day, week);
        for (int t = s; t < s + a.duration_slots; ++t) load[t] += a.power_kw;
      }
    } else {
      if (once >= schedule.once_off.size()) continue;
      const OnceOffAssignment& o = schedule.once_off[once++];
      if (!o.scheduled) continue;
      for (int t = o.start_slot; t < o.start_slot + a.duration_slots; ++t) load[t] += a.power_kw;
    }
  }
}

void add_battery_load(const Instance& instance, const Schedule& schedule, std::span<double> load) {
  for (std::size_t b = 0; b < schedule.battery_actions.size(); ++b) {
    const auto& actions = schedule.battery_actions[b];
    for (std::size_t t = 0; t < actions.size(); ++t) load[t] += grid_effect_kw(instance.batteries[b], actions[t]);
  }
}

std::vector<double> total_load(const Instance& instance, const Schedule& schedule) {
  std::vector<double> load = instance.base_load.values;
  add_activity_load(instance, schedule, load);
  add_battery_load(instance, schedule, load);
  return load;
}

SeriesFrame total_load_series(const Instance& instance, const Schedule& schedule) {
  return SeriesFrame{instance.base_load.start, kStepMinutes, total_load(instance, schedule)};
}

double energy_cost(std::span<const double> load, std::span<const double> price) {
  double sum = 0.0;
  for (std::size_t t = 0; t < load.size(); ++t) sum += 0.25 * load[t] * price[t] / 1000.0;
  return sum;
}

double energy_and_peak_cost(std::span<const double> load, std::span<const double> price) {
  if (load.empty()) return 0.0;
  const double peak = *std::max_element(load.begin(), load.end());
  return energy_cost(load, price) + kPeakTariff * peak * peak;
}

double once_off_reward(const Instance& instance, const Schedule& schedule) {
  double reward = 0.0;
  std::size_t once = 0;
  for (const Activity& a : instance.activities) {
    if (a.is_recurring()) continue;
    if (once >= schedule.once_off.size()) break;
    const OnceOffAssignment& o = schedule.once_off[once++];
    if (!o.scheduled) continue;
    const bool outside = outside_working_hours(instance.horizon, o.start_slot, a.duration_slots);
    reward += a.value - (outside ? a.penalty : 0.0);
  }
  return reward;
}

CostBreakdown schedule_cost(const Instance& instance, const Schedule& schedule, std::span<const double> load) {
  CostBreakdown c;
  c.energy_cost = energy_cost(load, instance.price.values);
  c.peak_kw = load.empty() ? 0.0 : *std::max_element(load.begin(), load.end());
  c.peak_cost = kPeakTariff * c.peak_kw * c.peak_kw;
  c.once_off_reward = once_off_reward(instance, schedule);
  c.total = c.energy_cost + c.peak_cost - c.once_off_reward;
  return c;
}

CostBreakdown evaluate_schedule(const Instance& instance, const Schedule& schedule) {
  const auto load = total_load(instance, schedule);
  return schedule_cost(instance, schedule, load);
}

double mase(std::span<const double> forecast, std::span<const double> actual, std::span<const double> training,
            int season_length) {
  if (forecast.size() != actual.size()) throw std::invalid_argument("mase: forecast and actual lengths differ");
  if (forecast.empty()) throw std::invalid_argument("mase: empty forecast horizon");
  if (season_length < 1 || training.size() <= static_cast<std::size_t>(season_length)) {
    throw std::invalid_argument("mase: training series must be longer than the season length");
  }
  double numerator = 0.0;
  for (std::size_t k = 0; k < forecast.size(); ++k) numerator += std::abs(forecast[k] - actual[k]);

  const auto lag = static_cast<std::size_t>(season_length);
  double seasonal = 0.0;
  for (std::size_t k = lag; k < training.size(); ++k) seasonal += std::abs(training[k] - training[k - lag]);
  const double h = static_cast<double>(forecast.size());
  const double denominator = h / static_cast<double>(training.size() - lag) * seasonal;
  if (denominator == 0.0) throw ZeroScaleError("mase: seasonal naive error of the training series is zero");
  return numerator / denominator;
}

double mase(const SeriesFrame& forecast, const SeriesFrame& actual, const SeriesFrame& training, int season_length) {
  return mase(std::span<const double>(forecast.values), std::span<const double>(actual.values),
              std::span<const double>(training.values), season_length);
}

}  // namespace campsched
