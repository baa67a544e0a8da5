#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "campsched/series.hpp"

namespace campsched {

/// Scheduling horizon in 15-minute slots. Day d covers slots [96d, 96d + 96).
struct Horizon {
  int n_slots = 0;
  int first_weekday = 0;  // weekday of slot 0, 0 = Monday
  int working_start_slot_of_day = 36;  // 09:00
  int working_end_slot_of_day = 68;    // 17:00, exclusive
  int slots_per_day = 96;
  int first_monday_day_index = 0;

  [[nodiscard]] int n_days() const noexcept { return n_slots / slots_per_day; }
  [[nodiscard]] int day_of_slot(int slot) const noexcept { return slot / slots_per_day; }
  [[nodiscard]] int weekday_of_day(int day) const noexcept { return (first_weekday + day) % 7; }
  [[nodiscard]] int working_slots_per_day() const noexcept {
    return working_end_slot_of_day - working_start_slot_of_day;
  }
  /// Slot lies inside working hours of a Monday..Friday.
  [[nodiscard]] bool is_working_slot(int slot) const noexcept {
    const int tod = slot % slots_per_day;
    return weekday_of_day(day_of_slot(slot)) < 5 && tod >= working_start_slot_of_day &&
           tod < working_end_slot_of_day;
  }

  bool operator==(const Horizon&) const = default;
};

struct Building {
  int id = 0;
  int n_rooms = 0;
  bool operator==(const Building&) const = default;
};

struct Battery {
  int id = 0;
  double capacity_kwh = 0.0;
  double max_power_kw = 0.0;
  double efficiency = 1.0;
  bool operator==(const Battery&) const = default;
};

enum class ActivityKind { recurring, once_off };

struct Activity {
  int id = 0;
  ActivityKind kind = ActivityKind::recurring;
  double power_kw = 0.0;  // total draw while running, not per room
  int duration_slots = 1;
  int n_rooms = 1;
  double value = 0.0;    // once-off only
  double penalty = 0.0;  // once-off only, charged when outside working hours
  std::vector<int> precedences;  // ids that must run at least one calendar day earlier

  [[nodiscard]] bool is_recurring() const noexcept { return kind == ActivityKind::recurring; }
  bool operator==(const Activity&) const = default;
};

struct Instance {
  std::string name;
  Horizon horizon;
  std::vector<Building> buildings;
  std::vector<Battery> batteries;
  std::vector<Activity> activities;
  SeriesFrame price;      // $/MWh per slot
  SeriesFrame base_load;  // kW per slot, buildings minus solar

  [[nodiscard]] int total_rooms() const noexcept;
  [[nodiscard]] int count(ActivityKind kind) const noexcept;

  bool operator==(const Instance&) const = default;
};

/// Recurring activities repeat for this many consecutive weeks from the first Monday.
inline constexpr int kRecurringWeeks = 4;

/// Throws ValidationError naming the first violated invariant.
void validate_instance(const Instance& instance);

/// "small" (50 recurring / 20 once-off), "large" (200 / 100) or "custom".
std::string classify_size(const Instance& instance);

/// Reads the instance JSON; series CSV paths are resolved relative to the JSON file.
Instance parse_instance(const std::filesystem::path& path);
Instance instance_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// JSON document referencing `price_csv` / `base_load_csv` by the given relative names.
nlohmann::json instance_to_json(const Instance& instance, const std::string& price_csv,
                                const std::string& base_load_csv);

/// Writes <stem>.json, <stem>_price.csv and <stem>_base_load.csv into `dir`; returns the JSON path.
std::filesystem::path write_instance(const Instance& instance, const std::filesystem::path& dir,
                                     const std::string& stem);

/// Copy of `instance` with the base load replaced (forecast vs actual evaluation).
Instance with_base_load(Instance instance, SeriesFrame base_load);

enum class InstanceSize { small, large };

/// Knobs of the synthetic generator; presets give the small and large sizes.
struct SyntheticSpec {
  int n_recurring = 50;
  int n_once_off = 20;
  int n_days = 30;
  int n_buildings = 6;
  int rooms_per_building_min = 1;
  int rooms_per_building_max = 3;
  int n_batteries = 2;
  int max_precedence_depth = 4;
  double precedence_fraction = 0.15;  // share of activities that get predecessors

  static SyntheticSpec preset(InstanceSize size);
};

Instance generate_synthetic_instance(InstanceSize size, std::uint64_t seed);
Instance generate_synthetic_instance(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace campsched
