#include "campsched/local_search.hpp"

#include <algorithm>
#include <limits>

#include "campsched/objective.hpp"
#include "parallel.hpp"

namespace campsched {

std::vector<int> improvement_order(const Problem& problem) {
  std::vector<int> order(problem.repair_order().begin(), problem.repair_order().end());
  std::stable_partition(order.begin(), order.end(), [&](int a) { return problem.activity(a).is_recurring(); });
  return order;
}

std::vector<TimeCandidate> time_candidates(const Problem& problem, const Schedule& current, int index, int pass) {
  const Horizon& h = problem.horizon();
  const Activity& act = problem.activity(index);
  const int pos = problem.position(index);

  int latest = -1;
  for (int q : problem.predecessors(index)) {
    const int qpos = problem.position(q);
    if (problem.activity(q).is_recurring()) {
      latest = std::max(latest, h.first_monday_day_index + current.recurring[qpos].weekday);
    } else if (current.once_off[qpos].scheduled) {
      latest = std::max(latest, h.day_of_slot(current.once_off[qpos].start_slot));
    } else {
      return {};  // repair would drop it again
    }
  }

  std::vector<TimeCandidate> out;
  if (act.is_recurring()) {
    std::vector<int> days;
    if (pass == 1) {
      const auto allowed = problem.day_options(pos);
      days.assign(allowed.begin(), allowed.end());
    } else {
      days = {0, 1, 2, 3, 4};
    }
    for (int wd : days) {
      if (h.first_monday_day_index + wd <= latest) continue;
      for (int s = h.working_start_slot_of_day; s + act.duration_slots <= h.working_end_slot_of_day; ++s) {
        out.push_back({wd, s});
      }
    }
    return out;
  }

  int last_day = h.n_days() - 1;
  if (pass == 1) last_day -= problem.precedence().level_after[index];
  for (int d = latest + 1; d <= last_day; ++d) {
    for (int s = d * h.slots_per_day; s < (d + 1) * h.slots_per_day && s + act.duration_slots <= h.n_slots; ++s) {
      out.push_back({h.weekday_of_day(d), s});
    }
  }
  return out;
}

namespace {

Placement moved(const Problem& problem, Placement p, int index, const TimeCandidate& c) {
  const int pos = problem.position(index);
  if (problem.activity(index).is_recurring()) {
    p.weekday[pos] = c.weekday;
    p.start_of_day[pos] = c.start;
  } else {
    p.start_slot[pos] = c.start;
    p.included[pos] = 1;
  }
  return p;
}

}  // namespace

CandidateChoice evaluate_time_candidates(const Problem& problem, const Schedule& current, double current_cost,
                                         int index, std::span<const TimeCandidate> candidates, int threads) {
  const Placement base = placement_from_schedule(problem, current);
  std::vector<double> costs(candidates.size());
  detail::parallel_for(candidates.size(), threads, [&](std::size_t k) {
    costs[k] = repair_and_evaluate(problem, moved(problem, base, index, candidates[k])).cost;
  });

  CandidateChoice choice{-1, current_cost, current};
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (costs[k] < choice.cost) {
      choice.cost = costs[k];
      choice.chosen = static_cast<int>(k);
    }
  }
  if (choice.chosen >= 0) {
    auto ind = repair_and_evaluate(problem, moved(problem, base, index, candidates[choice.chosen]));
    choice.schedule = std::move(*ind.schedule);
  }
  return choice;
}

ImproveResult improve_schedule(const Problem& problem, const Schedule& base, ImproveVariant variant, int threads) {
  const Instance& inst = problem.instance();
  Schedule input = base;
  input.battery_actions.clear();
  const double input_cost = evaluate_schedule(inst, input).total;

  ImproveResult res{input, input_cost, 0, 0};
  if (variant == ImproveVariant::drop) {
    Placement p = placement_from_schedule(problem, input);
    std::fill(p.included.begin(), p.included.end(), 0);
    auto ind = repair_and_evaluate(problem, std::move(p));
    ++res.evaluations;
    if (ind.schedule) {
      res.schedule = std::move(*ind.schedule);
      res.cost = ind.cost;
    }
  }

  const auto order = improvement_order(problem);
  for (int pass = 1; pass <= 2; ++pass) {
    for (int a : order) {
      const auto candidates = time_candidates(problem, res.schedule, a, pass);
      if (candidates.empty()) continue;
      auto choice = evaluate_time_candidates(problem, res.schedule, res.cost, a, candidates, threads);
      res.evaluations += static_cast<long>(candidates.size());
      if (choice.chosen >= 0) {
        res.schedule = std::move(choice.schedule);
        res.cost = choice.cost;
        ++res.moves;
      }
    }
  }

  if (res.cost > input_cost) {
    res.schedule = std::move(input);
    res.cost = input_cost;
  }
  return res;
}

}  // namespace campsched
