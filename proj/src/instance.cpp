#include "campsched/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "rng.hpp"

namespace campsched {

using nlohmann::json;

int Instance::total_rooms() const noexcept {
  int total = 0;
  for (const auto& b : buildings) total += b.n_rooms;
  return total;
}

int Instance::count(ActivityKind kind) const noexcept {
  return static_cast<int>(
      std::count_if(activities.begin(), activities.end(), [kind](const Activity& a) { return a.kind == kind; }));
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ValidationError(what); }

std::string activity_label(const Activity& a) { return "activity " + std::to_string(a.id); }

void validate_horizon(const Horizon& h) {
  if (h.slots_per_day <= 0) invalid("horizon: slots_per_day must be positive");
  if (h.n_slots <= 0) invalid("horizon: n_slots must be positive");
  if (h.n_slots % h.slots_per_day != 0) invalid("horizon: n_slots must be a whole number of days");
  if (h.working_start_slot_of_day < 0 || h.working_start_slot_of_day >= h.working_end_slot_of_day ||
      h.working_end_slot_of_day > h.slots_per_day) {
    invalid("horizon: working hours must satisfy 0 <= start < end <= slots_per_day");
  }
  if (h.first_weekday < 0 || h.first_weekday > 6) invalid("horizon: first_weekday must be in 0..6");
  if (h.first_monday_day_index < 0 || h.first_monday_day_index >= 7) {
    invalid("horizon: first_monday_day_index must be in 0..6");
  }
  if (h.first_monday_day_index != (7 - h.first_weekday) % 7) {
    invalid("horizon: first_monday_day_index inconsistent with first_weekday");
  }
}

void validate_series(const SeriesFrame& s, const Horizon& h, const std::string& label) {
  if (s.step_minutes != kStepMinutes) invalid(label + ": step must be 15 minutes");
  if (static_cast<int>(s.values.size()) != h.n_slots) {
    invalid(label + ": series length " + std::to_string(s.values.size()) + " does not match n_slots " +
            std::to_string(h.n_slots));
  }
  for (double v : s.values) {
    if (!std::isfinite(v)) invalid(label + ": non-finite value");
  }
  if (s.start != std::chrono::floor<std::chrono::days>(s.start)) invalid(label + ": series must start at midnight");
  if (weekday_of(s.start) != h.first_weekday) invalid(label + ": start weekday does not match horizon.first_weekday");
}

// Kahn's algorithm; returns false if a cycle remains.
bool is_acyclic(const std::vector<Activity>& acts, const std::unordered_map<int, int>& index) {
  const std::size_t n = acts.size();
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> succ(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int p : acts[i].precedences) {
      succ[index.at(p)].push_back(static_cast<int>(i));
      ++indeg[i];
    }
  }
  std::vector<int> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++seen;
    for (int w : succ[v]) {
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  return seen == n;
}

}  // namespace

void validate_instance(const Instance& instance) {
  const Horizon& h = instance.horizon;
  validate_horizon(h);

  std::unordered_set<int> ids;
  for (const auto& b : instance.buildings) {
    if (!ids.insert(b.id).second) invalid("building id " + std::to_string(b.id) + " is not unique");
    if (b.n_rooms < 0) invalid("building " + std::to_string(b.id) + ": n_rooms must be >= 0");
  }
  ids.clear();
  for (const auto& b : instance.batteries) {
    const std::string label = "battery " + std::to_string(b.id);
    if (!ids.insert(b.id).second) invalid(label + " id is not unique");
    if (!(b.capacity_kwh > 0.0)) invalid(label + ": capacity_kwh must be > 0");
    if (!(b.max_power_kw > 0.0)) invalid(label + ": max_power_kw must be > 0");
    if (!(b.efficiency > 0.0 && b.efficiency <= 1.0)) invalid(label + ": efficiency must be in (0, 1]");
  }

  std::unordered_map<int, int> index;
  for (std::size_t i = 0; i < instance.activities.size(); ++i) {
    if (!index.emplace(instance.activities[i].id, static_cast<int>(i)).second) {
      invalid("activity id " + std::to_string(instance.activities[i].id) + " is not unique");
    }
  }
  bool any_recurring = false;
  for (const auto& a : instance.activities) {
    const std::string label = activity_label(a);
    if (a.duration_slots < 1) invalid(label + ": duration_slots must be >= 1");
    if (a.n_rooms < 1) invalid(label + ": n_rooms must be >= 1");
    if (!(std::isfinite(a.power_kw) && a.power_kw >= 0.0)) invalid(label + ": power_kw must be >= 0");
    if (!(a.value >= 0.0) || !(a.penalty >= 0.0)) invalid(label + ": value and penalty must be >= 0");
    if (a.is_recurring()) {
      any_recurring = true;
      if (a.duration_slots > h.working_slots_per_day()) invalid(label + ": longer than the working day");
    } else if (a.duration_slots > h.n_slots) {
      invalid(label + ": longer than the horizon");
    }
    for (int p : a.precedences) {
      const auto it = index.find(p);
      if (it == index.end()) invalid(label + ": unknown precedence id " + std::to_string(p));
      if (p == a.id) invalid("precedence cycle at " + label);
      if (a.is_recurring() && !instance.activities[it->second].is_recurring()) {
        invalid(label + ": a recurring activity cannot depend on once-off activity " + std::to_string(p));
      }
    }
  }
  if (!is_acyclic(instance.activities, index)) invalid("precedence cycle");
  if (any_recurring && h.first_monday_day_index + 7 * (kRecurringWeeks - 1) + 5 > h.n_days()) {
    invalid("horizon: too short for four weekly occurrences of recurring activities");
  }

  validate_series(instance.price, h, "price");
  validate_series(instance.base_load, h, "base_load");
  if (instance.price.start != instance.base_load.start) invalid("price and base_load start at different times");
}

std::string classify_size(const Instance& instance) {
  const int rec = instance.count(ActivityKind::recurring);
  const int once = instance.count(ActivityKind::once_off);
  if (rec == 50 && once == 20) return "small";
  if (rec == 200 && once == 100) return "large";
  return "custom";
}

Instance instance_from_json(const json& doc, const std::filesystem::path& base_dir) {
  Instance inst;
  try {
    inst.name = doc.value("name", std::string{});
    const json& h = doc.at("horizon");
    inst.horizon.n_slots = h.at("n_slots").get<int>();
    inst.horizon.first_weekday = h.at("first_weekday").get<int>();
    inst.horizon.working_start_slot_of_day = h.at("working_start_slot_of_day").get<int>();
    inst.horizon.working_end_slot_of_day = h.at("working_end_slot_of_day").get<int>();
    inst.horizon.first_monday_day_index = h.at("first_monday_day_index").get<int>();
    inst.horizon.slots_per_day = h.value("slots_per_day", 96);

    for (const json& b : doc.at("buildings")) {
      inst.buildings.push_back({b.at("id").get<int>(), b.at("n_rooms").get<int>()});
    }
    for (const json& b : doc.at("batteries")) {
      inst.batteries.push_back({b.at("id").get<int>(), b.at("capacity_kwh").get<double>(),
                                b.at("max_power_kw").get<double>(), b.at("efficiency").get<double>()});
    }
    for (const json& a : doc.at("activities")) {
      Activity act;
      act.id = a.at("id").get<int>();
      const auto kind = a.at("kind").get<std::string>();
      if (kind == "recurring") {
        act.kind = ActivityKind::recurring;
      } else if (kind == "once_off") {
        act.kind = ActivityKind::once_off;
      } else {
        throw ParseError("activity " + std::to_string(act.id) + ": unknown kind '" + kind + "'");
      }
      act.power_kw = a.at("power_kw").get<double>();
      act.duration_slots = a.at("duration_slots").get<int>();
      act.n_rooms = a.at("n_rooms").get<int>();
      act.value = a.value("value", 0.0);
      act.penalty = a.value("penalty", 0.0);
      act.precedences = a.value("precedences", std::vector<int>{});
      inst.activities.push_back(std::move(act));
    }
    inst.price = read_series_csv(base_dir / doc.at("price_csv").get<std::string>());
    inst.base_load = read_series_csv(base_dir / doc.at("base_load_csv").get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
  validate_instance(inst);
  return inst;
}

Instance parse_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return instance_from_json(doc, path.parent_path());
}

json instance_to_json(const Instance& instance, const std::string& price_csv, const std::string& base_load_csv) {
  const Horizon& h = instance.horizon;
  json doc;
  if (!instance.name.empty()) doc["name"] = instance.name;
  doc["horizon"] = {{"n_slots", h.n_slots},
                    {"first_weekday", h.first_weekday},
                    {"working_start_slot_of_day", h.working_start_slot_of_day},
                    {"working_end_slot_of_day", h.working_end_slot_of_day},
                    {"slots_per_day", h.slots_per_day},
                    {"first_monday_day_index", h.first_monday_day_index}};
  doc["buildings"] = json::array();
  for (const auto& b : instance.buildings) doc["buildings"].push_back({{"id", b.id}, {"n_rooms", b.n_rooms}});
  doc["batteries"] = json::array();
  for (const auto& b : instance.batteries) {
    doc["batteries"].push_back({{"id", b.id},
                                {"capacity_kwh", b.capacity_kwh},
                                {"max_power_kw", b.max_power_kw},
                                {"efficiency", b.efficiency}});
  }
  doc["activities"] = json::array();
  for (const auto& a : instance.activities) {
    json item = {{"id", a.id},
                 {"kind", a.is_recurring() ? "recurring" : "once_off"},
                 {"power_kw", a.power_kw},
                 {"duration_slots", a.duration_slots},
                 {"n_rooms", a.n_rooms},
                 {"precedences", a.precedences}};
    if (!a.is_recurring()) {
      item["value"] = a.value;
      item["penalty"] = a.penalty;
    }
    doc["activities"].push_back(std::move(item));
  }
  doc["price_csv"] = price_csv;
  doc["base_load_csv"] = base_load_csv;
  return doc;
}

std::filesystem::path write_instance(const Instance& instance, const std::filesystem::path& dir,
                                     const std::string& stem) {
  std::filesystem::create_directories(dir);
  const std::string price_name = stem + "_price.csv";
  const std::string load_name = stem + "_base_load.csv";
  write_series_csv(dir / price_name, instance.price);
  write_series_csv(dir / load_name, instance.base_load);
  const auto json_path = dir / (stem + ".json");
  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("cannot write " + json_path.string());
  out << instance_to_json(instance, price_name, load_name).dump(2) << '\n';
  return json_path;
}

Instance with_base_load(Instance instance, SeriesFrame base_load) {
  instance.base_load = std::move(base_load);
  validate_instance(instance);
  return instance;
}

// ---------------------------------------------------------------------------
// Synthetic generator

SyntheticSpec SyntheticSpec::preset(InstanceSize size) {
  SyntheticSpec spec;
  if (size == InstanceSize::large) {
    spec.n_recurring = 200;
    spec.n_once_off = 100;
    spec.rooms_per_building_min = 4;
    spec.rooms_per_building_max = 10;
  }
  return spec;
}

Instance generate_synthetic_instance(InstanceSize size, std::uint64_t seed) {
  Instance inst = generate_synthetic_instance(SyntheticSpec::preset(size), seed);
  inst.name = std::string(size == InstanceSize::small ? "small_" : "large_") + std::to_string(seed);
  return inst;
}

namespace {

double round_to(double v, double step) { return std::round(v / step) * step; }

// Fraction of clear-sky PV output at hour-of-day `hour` (0 at night).
double solar_shape(double hour) {
  if (hour <= 6.0 || hour >= 18.0) return 0.0;
  return std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
}

double bump(double hour, double centre, double width) {
  const double z = (hour - centre) / width;
  return std::exp(-0.5 * z * z);
}

}  // namespace

Instance generate_synthetic_instance(const SyntheticSpec& spec, std::uint64_t seed) {
  detail::Rng rng(seed);
  Instance inst;
  inst.name = "synthetic_" + std::to_string(seed);

  // Sunday 2020-11-01 as day 0, so the first Monday is day 1.
  const Timestamp start = parse_timestamp("2020-11-01T00:00:00");
  Horizon& h = inst.horizon;
  h.n_slots = spec.n_days * h.slots_per_day;
  h.first_weekday = weekday_of(start);
  h.first_monday_day_index = (7 - h.first_weekday) % 7;

  for (int b = 0; b < spec.n_buildings; ++b) {
    inst.buildings.push_back({b, rng.uniform_int(spec.rooms_per_building_min, spec.rooms_per_building_max)});
  }
  const int total_rooms = inst.total_rooms();

  for (int b = 0; b < spec.n_batteries; ++b) {
    const double power = 25.0 * rng.uniform_int(2, 10);
    const int steps = rng.uniform_int(4, 16);
    inst.batteries.push_back({b, steps * 0.25 * power, power, round_to(rng.uniform(0.80, 0.97), 0.01)});
  }

  // Every activity gets a layer; edges only go from lower to higher layers, so the
  // longest chain has at most max_precedence_depth edges.
  const int n_total = spec.n_recurring + spec.n_once_off;
  std::vector<int> layer(n_total);
  for (int i = 0; i < n_total; ++i) layer[i] = rng.uniform_int(0, spec.max_precedence_depth);

  for (int i = 0; i < n_total; ++i) {
    Activity a;
    a.id = i;
    a.kind = i < spec.n_recurring ? ActivityKind::recurring : ActivityKind::once_off;
    a.duration_slots = rng.uniform_int(2, 8);
    a.n_rooms = std::max(1, std::min(total_rooms, rng.uniform_int(1, 3)));
    if (a.is_recurring()) {
      a.power_kw = round_to(rng.uniform(5.0, 40.0), 0.1);
    } else {
      a.power_kw = round_to(rng.uniform(5.0, 60.0), 0.1);
      a.value = round_to(rng.uniform(50.0, 600.0), 0.01);
      a.penalty = round_to(a.value * rng.uniform(0.5, 1.2), 0.01);
    }
    if (layer[i] > 0 && rng.uniform() < spec.precedence_fraction) {
      // Recurring activities may only follow recurring ones.
      std::vector<int> pool;
      const int pool_end = a.is_recurring() ? spec.n_recurring : n_total;
      for (int j = 0; j < pool_end; ++j) {
        if (layer[j] < layer[i]) pool.push_back(j);
      }
      const int n_preds = std::min<int>(static_cast<int>(pool.size()), rng.uniform_int(1, 2));
      std::set<int> chosen;
      while (static_cast<int>(chosen.size()) < n_preds) {
        chosen.insert(pool[rng.uniform_int(0, static_cast<int>(pool.size()) - 1)]);
      }
      a.precedences.assign(chosen.begin(), chosen.end());
    }
    inst.activities.push_back(std::move(a));
  }

  const double building_level = rng.uniform(150.0, 300.0);
  const double occupancy_swing = rng.uniform(80.0, 200.0);
  const double solar_peak = rng.uniform(50.0, 150.0);
  inst.price.start = start;
  inst.base_load.start = start;
  inst.price.values.resize(h.n_slots);
  inst.base_load.values.resize(h.n_slots);
  for (int t = 0; t < h.n_slots; ++t) {
    const int day = h.day_of_slot(t);
    const bool weekend = h.weekday_of_day(day) >= 5;
    const double hour = (t % h.slots_per_day + 0.5) * 0.25;
    const double cloud = 0.6 + 0.4 * rng.uniform();
    const double sun = solar_shape(hour) * cloud;

    const double occupancy = weekend ? 0.2 * bump(hour, 13.0, 3.0) : bump(hour, 13.0, 3.5);
    double load = building_level * (weekend ? 0.75 : 1.0) + occupancy_swing * occupancy - solar_peak * sun;
    load += rng.normal() * 0.04 * building_level;
    inst.base_load.values[t] = round_to(load, 0.001);

    double price = 55.0 + 35.0 * bump(hour, 18.5, 1.5) + 15.0 * bump(hour, 8.0, 1.0) - 40.0 * sun;
    if (weekend) price -= 10.0;
    price += rng.normal() * 8.0;
    inst.price.values[t] = round_to(price, 0.01);
  }

  validate_instance(inst);
  return inst;
}

}  // namespace campsched
