#pragma once

#include <optional>
#include <span>
#include <vector>

#include "campsched/problem.hpp"
#include "campsched/schedule.hpp"

namespace campsched {

/// Score handed to the search for individuals whose rooms cannot be assigned.
inline constexpr double kInfeasibleCost = 200'000.0;

/// Real-valued genes in option-index units: (day, time) per recurring activity followed
/// by one start gene per once-off activity.
using Genome = std::vector<double>;

struct EvaluatedIndividual {
  Genome genome;
  std::optional<Schedule> schedule;  // absent iff cost == kInfeasibleCost
  double cost = kInfeasibleCost;
};

/// Day/time choice per activity before repair. Indexed by position in
/// Problem::recurring() / Problem::once_off().
struct Placement {
  std::vector<int> weekday;
  std::vector<int> start_of_day;
  std::vector<int> start_slot;
  std::vector<char> included;

  bool operator==(const Placement&) const = default;
};

/// floor(gene) clamped to [0, n_options - 1].
[[nodiscard]] int gene_to_index(double gene, int n_options) noexcept;

/// Number of options behind each gene, in genome order.
std::vector<int> gene_option_counts(const Problem& problem);

/// Option index per gene (day index into the admissible weekdays, time index, start index).
std::vector<int> genome_to_candidate(const Problem& problem, std::span<const double> genome);

Placement placement_from_genome(const Problem& problem, std::span<const double> genome);
Placement placement_from_schedule(const Problem& problem, const Schedule& schedule);

/// Pushes every activity that sits on or before a predecessor's day to the day after
/// its latest predecessor, keeping the time of day; processes activities by ascending
/// precedence level. Once-off activities pushed past the horizon, or whose once-off
/// predecessor is excluded, are excluded. Returns false when a recurring activity would
/// have to move past Friday.
bool enforce_precedence(const Problem& problem, Placement& placement);

/// Assigns the lowest-id free rooms, recurring first then once-off, largest
/// duration * rooms first. An activity without rooms at its time tries other start times
/// of the same day from nearest to furthest (earlier first on ties); recurring ones stay
/// within working hours. nullopt when some activity fits nowhere on its day.
std::optional<Schedule> assign_rooms(const Problem& problem, const Placement& placement);

/// Benefit of keeping once-off activity `once_pos` together with its once-off ancestors
/// not marked in `kept`: energy cost minus value plus incurred penalty, peak excluded.
double once_off_benefit(const Problem& problem, const Schedule& schedule, int once_pos,
                        const std::vector<char>& kept);

/// Greedily keeps the most negative-benefit once-off activity (with its required
/// ancestors) until every remaining benefit is >= 0, then unschedules the rest.
void prune_once_off(const Problem& problem, Schedule& schedule);

/// Precedence repair, room assignment, pruning and cost for a placement. Uses the
/// instance's base load (the current forecast).
EvaluatedIndividual repair_and_evaluate(const Problem& problem, Placement placement);

EvaluatedIndividual decode_and_repair(const Problem& problem, std::span<const double> genome);

/// Structural and constraint violations of a schedule (empty when feasible).
std::vector<std::string> schedule_violations(const Problem& problem, const Schedule& schedule);

}  // namespace campsched
