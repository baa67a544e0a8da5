#pragma once

#include <span>
#include <vector>

#include "campsched/decode.hpp"
#include "campsched/problem.hpp"
#include "campsched/schedule.hpp"

namespace campsched {

enum class ImproveVariant { keep, drop };

/// A new time for one activity. Recurring: weekday and start slot of day.
/// Once-off: absolute start slot (weekday unused).
struct TimeCandidate {
  int weekday = 0;
  int start = 0;

  bool operator==(const TimeCandidate&) const = default;
};

struct CandidateChoice {
  int chosen = -1;  // index into the candidate list, -1 = no move
  double cost = 0.0;
  Schedule schedule;
};

/// Re-places activity `index` at each candidate, repairs and scores the result. Returns
/// the cheapest, keeping the current schedule unless a candidate is strictly cheaper;
/// equal costs go to the earlier candidate.
CandidateChoice evaluate_time_candidates(const Problem& problem, const Schedule& current, double current_cost,
                                         int index, std::span<const TimeCandidate> candidates, int threads = 1);

/// Candidates for activity `index` in pass 1 (recommended days) or pass 2 (any day
/// after the current predecessors), ordered by day then time.
std::vector<TimeCandidate> time_candidates(const Problem& problem, const Schedule& current, int index, int pass);

/// Activities in improvement order: recurring first, then ascending level, then id.
std::vector<int> improvement_order(const Problem& problem);

struct ImproveResult {
  Schedule schedule;  // battery actions are dropped
  double cost = 0.0;
  long evaluations = 0;
  int moves = 0;
};

/// Two passes of one-activity-at-a-time moves. The drop variant unschedules every
/// once-off activity first. The result never costs more than `base`.
ImproveResult improve_schedule(const Problem& problem, const Schedule& base, ImproveVariant variant,
                               int threads = 1);

}  // namespace campsched
