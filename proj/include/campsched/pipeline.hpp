#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "campsched/evolution.hpp"
#include "campsched/local_search.hpp"
#include "campsched/objective.hpp"
#include "campsched/problem.hpp"

namespace campsched {

/// Failure inside one pipeline stage; what() starts with "<stage>: ".
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

enum class VariantChoice { keep, drop, both };

struct PipelineConfig {
  std::vector<Algorithm> algorithms{Algorithm::cmaes};
  EvolutionConfig evolution;  // algorithm field is overridden per entry of `algorithms`
  int top_k = 10;              // base schedules carried into improvement
  VariantChoice variants = VariantChoice::both;
  int battery_candidates = 3;  // best improved schedules that get a battery dispatch
  int threads = 0;
};

struct StageOutcome {
  Schedule schedule;
  CostBreakdown forecast_cost;
  std::optional<CostBreakdown> actual_cost;
};

struct PipelineReport {
  std::string instance_name;
  StageOutcome base;
  StageOutcome improved;
  StageOutcome final;
  std::vector<RunTrace> traces;  // one per entry of PipelineConfig::algorithms
  long evaluations = 0;          // evolution plus local search
};

/// Evolve, improve the top-K base schedules, dispatch batteries for the best improved
/// ones and evaluate every stage against the problem's base load (the forecast) and,
/// when given, an actual load.
PipelineReport run_pipeline(const Problem& problem, const PipelineConfig& config,
                            const std::optional<SeriesFrame>& actual_load = std::nullopt);

/// Adds the dispatch of `schedule`'s activity load to a copy of it.
Schedule with_battery_dispatch(const Problem& problem, const Schedule& schedule);

nlohmann::json report_to_json(const PipelineReport& report);

}  // namespace campsched
