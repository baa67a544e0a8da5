#include "campsched/schedule_io.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <string>

namespace campsched {

using nlohmann::json;

json schedule_to_json(const Schedule& s) {
  json doc;
  doc["recurring"] = json::array();
  for (const auto& r : s.recurring) {
    doc["recurring"].push_back(
        {{"id", r.id}, {"weekday", r.weekday}, {"start_slot_of_day", r.start_slot_of_day}, {"rooms", r.rooms}});
  }
  doc["once_off"] = json::array();
  for (const auto& o : s.once_off) {
    doc["once_off"].push_back(
        {{"id", o.id}, {"start_slot", o.start_slot}, {"rooms", o.rooms}, {"scheduled", o.scheduled}});
  }
  doc["battery_actions"] = json::array();
  for (const auto& row : s.battery_actions) {
    json arr = json::array();
    for (BatteryAction a : row) arr.push_back(static_cast<int>(a));
    doc["battery_actions"].push_back(std::move(arr));
  }
  return doc;
}

Schedule schedule_from_json(const json& doc, const Instance& instance) {
  std::map<int, RecurringAssignment> rec;
  std::map<int, OnceOffAssignment> once;
  Schedule s;
  try {
    for (const json& r : doc.at("recurring")) {
      RecurringAssignment a{r.at("id").get<int>(), r.at("weekday").get<int>(), r.at("start_slot_of_day").get<int>(),
                            r.at("rooms").get<std::vector<int>>()};
      if (!rec.emplace(a.id, a).second) throw ValidationError("schedule: duplicate recurring id " + std::to_string(a.id));
    }
    for (const json& o : doc.at("once_off")) {
      OnceOffAssignment a{o.at("id").get<int>(), o.at("start_slot").get<int>(), o.at("rooms").get<std::vector<int>>(),
                          o.at("scheduled").get<bool>()};
      if (!once.emplace(a.id, a).second) throw ValidationError("schedule: duplicate once-off id " + std::to_string(a.id));
    }
    if (doc.contains("battery_actions")) {
      for (const json& row : doc.at("battery_actions")) {
        std::vector<BatteryAction> actions;
        for (const json& v : row) {
          const int a = v.get<int>();
          if (a < -1 || a > 1) throw ValidationError("schedule: battery action must be -1, 0 or 1");
          actions.push_back(static_cast<BatteryAction>(a));
        }
        s.battery_actions.push_back(std::move(actions));
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("schedule: ") + e.what());
  }

  for (const Activity& a : instance.activities) {
    if (a.is_recurring()) {
      auto it = rec.find(a.id);
      if (it == rec.end()) throw ValidationError("schedule: recurring activity " + std::to_string(a.id) + " missing");
      s.recurring.push_back(std::move(it->second));
      rec.erase(it);
    } else {
      auto it = once.find(a.id);
      if (it == once.end()) throw ValidationError("schedule: once-off activity " + std::to_string(a.id) + " missing");
      s.once_off.push_back(std::move(it->second));
      once.erase(it);
    }
  }
  if (!rec.empty() || !once.empty()) throw ValidationError("schedule: entries for unknown activity ids");
  if (!s.battery_actions.empty()) {
    if (s.battery_actions.size() != instance.batteries.size()) {
      throw ValidationError("schedule: battery_actions needs one row per battery");
    }
    for (const auto& row : s.battery_actions) {
      if (static_cast<int>(row.size()) != instance.horizon.n_slots) {
        throw ValidationError("schedule: battery_actions rows need one entry per slot");
      }
    }
  }
  return s;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

void write_schedule(const std::filesystem::path& path, const Schedule& schedule) {
  write_json(path, schedule_to_json(schedule));
}

Schedule read_schedule(const std::filesystem::path& path, const Instance& instance) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schedule file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return schedule_from_json(doc, instance);
}

json cost_to_json(const CostBreakdown& c) {
  return {{"energy_cost", c.energy_cost},
          {"peak_cost", c.peak_cost},
          {"once_off_reward", c.once_off_reward},
          {"total", c.total},
          {"peak_kw", c.peak_kw}};
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "generation,best_cost\n";
  for (std::size_t g = 0; g < trace.best_cost_per_generation.size(); ++g) {
    out << g << ',' << format_double(trace.best_cost_per_generation[g]) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace_csv(out, trace);
}

}  // namespace campsched
