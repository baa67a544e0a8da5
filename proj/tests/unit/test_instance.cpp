#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "campsched/instance.hpp"
#include "campsched/precedence.hpp"
#include "oracles.hpp"

using namespace campsched;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("campsched_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string one_day_csv(double v) {
  SeriesFrame f{parse_timestamp("2021-03-01T00:00"), 15, std::vector<double>(96, v)};
  std::stringstream ss;
  write_series_csv(ss, f);
  return ss.str();
}

}  // namespace

TEST_CASE("minimal instance file parses") {
  const fs::path dir = scratch("minimal");
  write_text(dir / "p.csv", one_day_csv(40.0));
  write_text(dir / "l.csv", one_day_csv(100.0));
  write_text(dir / "min.json", R"({
    "horizon": {"n_slots": 96, "first_weekday": 0, "working_start_slot_of_day": 36,
                "working_end_slot_of_day": 68, "first_monday_day_index": 0},
    "buildings": [{"id": 0, "n_rooms": 2}], "batteries": [], "activities": [],
    "price_csv": "p.csv", "base_load_csv": "l.csv"})");
  const Instance inst = parse_instance(dir / "min.json");
  CHECK(inst.horizon.n_slots == 96);
  CHECK(inst.activities.empty());
  CHECK(inst.total_rooms() == 2);
  CHECK(classify_size(inst) == "custom");
}

TEST_CASE("malformed and invalid instance files") {
  const fs::path dir = scratch("invalid");
  write_text(dir / "p.csv", one_day_csv(40.0));
  write_text(dir / "l.csv", one_day_csv(100.0));
  write_text(dir / "broken.json", "{ not json");
  CHECK_THROWS_AS(parse_instance(dir / "broken.json"), ParseError);
  write_text(dir / "missing.json", R"({"horizon": {}})");
  CHECK_THROWS_AS(parse_instance(dir / "missing.json"), ParseError);
  CHECK_THROWS_AS(parse_instance(dir / "nope.json"), ParseError);

  const std::string head = R"({
    "horizon": {"n_slots": 96, "first_weekday": 0, "working_start_slot_of_day": 36,
                "working_end_slot_of_day": 68, "first_monday_day_index": 0},
    "buildings": [{"id": 0, "n_rooms": 2}], "batteries": [],
    "price_csv": "p.csv", "base_load_csv": "l.csv", )";
  write_text(dir / "cycle.json", head + R"("activities": [
      {"id": 1, "kind": "once_off", "power_kw": 1, "duration_slots": 1, "n_rooms": 1, "precedences": [2]},
      {"id": 2, "kind": "once_off", "power_kw": 1, "duration_slots": 1, "n_rooms": 1, "precedences": [1]}]})");
  CHECK_THROWS_WITH_AS(parse_instance(dir / "cycle.json"), "precedence cycle", ValidationError);

  write_text(dir / "unknown.json", head + R"("activities": [
      {"id": 1, "kind": "once_off", "power_kw": 1, "duration_slots": 1, "n_rooms": 1, "precedences": [9]}]})");
  CHECK_THROWS_AS(parse_instance(dir / "unknown.json"), ValidationError);

  write_text(dir / "l2.csv", "timestamp,value\n2021-03-01T00:00:00,1\n");
  std::string short_series = head + R"("activities": []})";
  short_series.replace(short_series.find("l.csv"), 5, "l2.csv");
  write_text(dir / "short.json", short_series);
  CHECK_THROWS_AS(parse_instance(dir / "short.json"), ValidationError);
}

TEST_CASE("validation names the violated invariant") {
  Instance inst = oracle::make_instance({oracle::recurring(1, 10, 4, 1)}, 2);
  CHECK_NOTHROW(validate_instance(inst));

  Instance dup = inst;
  dup.activities.push_back(oracle::recurring(1, 5, 2, 1));
  CHECK_THROWS_AS(validate_instance(dup), ValidationError);

  Instance rec_cycle = oracle::make_instance({oracle::recurring(1, 1, 1, 1, {2}), oracle::recurring(2, 1, 1, 1, {1})}, 2);
  CHECK_THROWS_WITH_AS(validate_instance(rec_cycle), "precedence cycle", ValidationError);

  Instance long_rec = oracle::make_instance({oracle::recurring(1, 1, 40, 1)}, 2);
  CHECK_THROWS_AS(validate_instance(long_rec), ValidationError);

  Instance short_horizon = oracle::make_instance({oracle::recurring(1, 1, 2, 1)}, 2, 14);
  CHECK_THROWS_AS(validate_instance(short_horizon), ValidationError);

  Instance bad_battery = inst;
  bad_battery.batteries = {Battery{0, 10.0, 5.0, 1.5}};
  CHECK_THROWS_AS(validate_instance(bad_battery), ValidationError);

  Instance bad_start = inst;
  bad_start.price.start = parse_timestamp("2021-03-02T00:00");
  CHECK_THROWS_AS(validate_instance(bad_start), ValidationError);
}

TEST_CASE("generated instances have the published sizes") {
  const Instance small = generate_synthetic_instance(InstanceSize::small, 3);
  CHECK(small.count(ActivityKind::recurring) == 50);
  CHECK(small.count(ActivityKind::once_off) == 20);
  CHECK(classify_size(small) == "small");

  const Instance large = generate_synthetic_instance(InstanceSize::large, 7);
  CHECK(large.count(ActivityKind::recurring) == 200);
  CHECK(large.count(ActivityKind::once_off) == 100);
  CHECK(classify_size(large) == "large");
}

TEST_CASE("generator is deterministic down to the bytes") {
  const fs::path a = scratch("gen_a");
  const fs::path b = scratch("gen_b");
  write_instance(generate_synthetic_instance(InstanceSize::small, 1), a, "x");
  write_instance(generate_synthetic_instance(InstanceSize::small, 1), b, "x");
  for (const char* f : {"x.json", "x_price.csv", "x_base_load.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(generate_synthetic_instance(InstanceSize::small, 1) != generate_synthetic_instance(InstanceSize::small, 2));
}

TEST_CASE("generated instances satisfy every invariant over 100 seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CAPTURE(seed);
    const Instance inst = generate_synthetic_instance(seed % 10 == 9 ? InstanceSize::large : InstanceSize::small, seed);
    CHECK_NOTHROW(validate_instance(inst));
    const PrecedenceInfo info = compute_levels(inst);
    CHECK(*std::max_element(info.level.begin(), info.level.end()) <= 4);
    for (const Battery& bat : inst.batteries) {
      const double steps = bat.capacity_kwh / (0.25 * bat.max_power_kw);
      CHECK(steps == doctest::Approx(std::round(steps)).epsilon(1e-12));
      CHECK(steps >= 1.0);
    }
    for (std::size_t i = 0; i < inst.activities.size(); ++i) {
      if (inst.activities[i].is_recurring()) CHECK(info.level[i] + info.level_after[i] <= 4);
    }
  }
}

TEST_CASE("instance files round trip") {
  const fs::path dir = scratch("roundtrip");
  Instance inst = generate_synthetic_instance(InstanceSize::small, 11);
  const fs::path path = write_instance(inst, dir, "rt");
  const Instance back = parse_instance(path);
  CHECK(back == inst);
  write_instance(back, dir, "rt2");
  CHECK(parse_instance(dir / "rt2.json") == inst);
}

TEST_CASE("with_base_load swaps the load and revalidates") {
  const Instance inst = generate_synthetic_instance(InstanceSize::small, 2);
  SeriesFrame other = inst.base_load;
  for (double& v : other.values) v += 1.0;
  CHECK(with_base_load(inst, other).base_load == other);
  other.values.pop_back();
  CHECK_THROWS_AS(with_base_load(inst, other), ValidationError);
}
