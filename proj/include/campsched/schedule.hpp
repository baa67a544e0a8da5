#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "campsched/instance.hpp"

namespace campsched {

struct RecurringAssignment {
  int id = 0;
  int weekday = 0;  // 0 = Monday, first occurrence in the week of the first Monday
  int start_slot_of_day = 0;
  std::vector<int> rooms;  // global room ids

  bool operator==(const RecurringAssignment&) const = default;
};

struct OnceOffAssignment {
  int id = 0;
  int start_slot = 0;  // absolute slot
  std::vector<int> rooms;
  bool scheduled = false;

  bool operator==(const OnceOffAssignment&) const = default;
};

enum class BatteryAction : std::int8_t { discharge = -1, hold = 0, charge = 1 };

/// Recurring and once-off entries follow the order of their activities in the instance.
/// `battery_actions` is either empty (every battery holds) or one row of n_slots per battery.
struct Schedule {
  std::vector<RecurringAssignment> recurring;
  std::vector<OnceOffAssignment> once_off;
  std::vector<std::vector<BatteryAction>> battery_actions;

  bool operator==(const Schedule&) const = default;
};

/// Grid-side battery convention: every action runs at full power for one slot, the
/// state of charge moves by exactly 0.25 * max_power kWh, the grid sees +max_power on
/// charge and -max_power * sqrt(efficiency) on discharge.
[[nodiscard]] inline double grid_effect_kw(const Battery& b, BatteryAction action) noexcept {
  switch (action) {
    case BatteryAction::charge:
      return b.max_power_kw;
    case BatteryAction::discharge:
      return -b.max_power_kw * std::sqrt(b.efficiency);
    case BatteryAction::hold:
      break;
  }
  return 0.0;
}

/// Energy moved per action, kWh.
[[nodiscard]] inline double soc_step_kwh(const Battery& b) noexcept { return 0.25 * b.max_power_kw; }

/// Number of lattice steps above empty that fit in the battery.
[[nodiscard]] inline int soc_levels(const Battery& b) noexcept {
  return static_cast<int>(std::floor(b.capacity_kwh / soc_step_kwh(b) + 1e-9));
}

/// 1 when any occupied slot of a once-off run starting at `start` falls outside working hours.
[[nodiscard]] bool outside_working_hours(const Horizon& horizon, int start, int duration) noexcept;

/// Absolute start slot of occurrence `week` of a recurring assignment.
[[nodiscard]] inline int recurring_start_slot(const Horizon& h, int weekday, int start_of_day, int week) noexcept {
  return (h.first_monday_day_index + 7 * week + weekday) * h.slots_per_day + start_of_day;
}

}  // namespace campsched
