#pragma once

#include <filesystem>
#include <iosfwd>

#include "json.hpp"

#include "campsched/evolution.hpp"
#include "campsched/instance.hpp"
#include "campsched/objective.hpp"
#include "campsched/schedule.hpp"

namespace campsched {

nlohmann::json schedule_to_json(const Schedule& schedule);

/// Entries are matched to the instance by id and returned in instance order. Throws
/// ParseError on malformed documents and ValidationError on unknown or missing ids.
Schedule schedule_from_json(const nlohmann::json& doc, const Instance& instance);

void write_schedule(const std::filesystem::path& path, const Schedule& schedule);
Schedule read_schedule(const std::filesystem::path& path, const Instance& instance);

nlohmann::json cost_to_json(const CostBreakdown& cost);

/// "generation,best_cost" rows, one per generation.
void write_trace_csv(std::ostream& out, const RunTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);

/// Writes `doc` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace campsched
