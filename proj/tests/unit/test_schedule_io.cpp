#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "campsched/decode.hpp"
#include "campsched/schedule_io.hpp"
#include "oracles.hpp"

using namespace campsched;
using nlohmann::json;

namespace {

Instance small_instance() {
  SyntheticSpec spec;
  spec.n_recurring = 5;
  spec.n_once_off = 4;
  spec.n_days = 28;
  spec.n_buildings = 2;
  return generate_synthetic_instance(spec, 7);
}

Schedule some_schedule(const Instance& inst) {
  const Problem p(inst);
  std::vector<double> genome(gene_option_counts(p).size());
  std::optional<Schedule> found;
  for (double frac = 0.05; !found; frac += 0.1) {
    REQUIRE(frac < 1.0);
    for (std::size_t i = 0; i < genome.size(); ++i) genome[i] = frac * gene_option_counts(p)[i];
    found = decode_and_repair(p, genome).schedule;
  }
  Schedule s = *found;
  s.battery_actions.assign(inst.batteries.size(), std::vector<BatteryAction>(inst.horizon.n_slots, BatteryAction::hold));
  if (!s.battery_actions.empty()) {
    s.battery_actions[0][10] = BatteryAction::charge;
    s.battery_actions[0][20] = BatteryAction::discharge;
  }
  return s;
}

}  // namespace

TEST_CASE("schedule json round trip") {
  const Instance inst = small_instance();
  const Schedule s = some_schedule(inst);
  CHECK(schedule_from_json(schedule_to_json(s), inst) == s);
  CHECK(schedule_from_json(json::parse(schedule_to_json(s).dump()), inst) == s);

  const auto dir = std::filesystem::temp_directory_path() / "campsched_io_test";
  std::filesystem::create_directories(dir);
  write_schedule(dir / "s.json", s);
  CHECK(read_schedule(dir / "s.json", inst) == s);
  std::filesystem::remove_all(dir);
}

TEST_CASE("entries are matched by id") {
  const Instance inst = small_instance();
  const Schedule s = some_schedule(inst);
  json doc = schedule_to_json(s);
  std::reverse(doc["recurring"].begin(), doc["recurring"].end());
  std::reverse(doc["once_off"].begin(), doc["once_off"].end());
  CHECK(schedule_from_json(doc, inst) == s);

  SUBCASE("battery rows may be omitted") {
    doc.erase("battery_actions");
    CHECK(schedule_from_json(doc, inst).battery_actions.empty());
  }
  SUBCASE("missing id") {
    doc["once_off"].erase(0);
    CHECK_THROWS_AS(schedule_from_json(doc, inst), ValidationError);
  }
  SUBCASE("duplicate id") {
    doc["recurring"].push_back(doc["recurring"][0]);
    CHECK_THROWS_AS(schedule_from_json(doc, inst), ValidationError);
  }
  SUBCASE("unknown id") {
    json extra = doc["recurring"][0];
    extra["id"] = 9999;
    doc["recurring"].push_back(extra);
    CHECK_THROWS_AS(schedule_from_json(doc, inst), ValidationError);
  }
  SUBCASE("bad battery action") {
    doc["battery_actions"][0][0] = 2;
    CHECK_THROWS_AS(schedule_from_json(doc, inst), ValidationError);
  }
  SUBCASE("short battery row") {
    doc["battery_actions"][0].erase(0);
    CHECK_THROWS_AS(schedule_from_json(doc, inst), ValidationError);
  }
  SUBCASE("wrong types") {
    doc["recurring"][0]["weekday"] = "monday";
    CHECK_THROWS_AS(schedule_from_json(doc, inst), ParseError);
  }
  SUBCASE("missing section") {
    doc.erase("recurring");
    CHECK_THROWS_AS(schedule_from_json(doc, inst), ParseError);
  }
}

TEST_CASE("unreadable schedule file") {
  const Instance inst = small_instance();
  const auto path = std::filesystem::temp_directory_path() / "campsched_bad_schedule.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(read_schedule(path, inst), ParseError);
  std::filesystem::remove(path);
  CHECK_THROWS(read_schedule(path, inst));
}

TEST_CASE("trace csv") {
  RunTrace t;
  t.best_cost_per_generation = {10.5, 9.25, 9.25};
  t.run_of_generation = {0, 0, 1};
  std::ostringstream out;
  write_trace_csv(out, t);
  CHECK(out.str() == "generation,best_cost\n0,10.5\n1,9.25\n2,9.25\n");
}

TEST_CASE("cost json carries every component") {
  CostBreakdown c;
  c.energy_cost = 1.5;
  c.peak_cost = 2.0;
  c.once_off_reward = 0.5;
  c.total = 3.0;
  const json j = cost_to_json(c);
  CHECK(j.at("energy_cost").get<double>() == 1.5);
  CHECK(j.at("total").get<double>() == 3.0);
}
