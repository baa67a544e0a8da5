#include "campsched/decode.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>

#include "campsched/objective.hpp"

namespace campsched {

int gene_to_index(double gene, int n_options) noexcept {
  if (n_options <= 1 || !(gene >= 0.0)) return 0;  // NaN maps to 0 as well
  if (gene >= static_cast<double>(n_options - 1)) return n_options - 1;
  return static_cast<int>(std::floor(gene));
}

std::vector<int> gene_option_counts(const Problem& problem) {
  std::vector<int> counts;
  const auto rec = problem.recurring();
  counts.reserve(2 * rec.size() + problem.once_off().size());
  for (std::size_t r = 0; r < rec.size(); ++r) {
    counts.push_back(static_cast<int>(problem.day_options(static_cast<int>(r)).size()));
    counts.push_back(problem.time_options_recurring(static_cast<int>(r)));
  }
  for (std::size_t o = 0; o < problem.once_off().size(); ++o) {
    counts.push_back(problem.time_options_once_off(static_cast<int>(o)));
  }
  return counts;
}

std::vector<int> genome_to_candidate(const Problem& problem, std::span<const double> genome) {
  const auto counts = gene_option_counts(problem);
  if (genome.size() != counts.size()) {
    throw std::invalid_argument("genome length " + std::to_string(genome.size()) + " does not match " +
                                std::to_string(counts.size()));
  }
  std::vector<int> idx(counts.size());
  for (std::size_t g = 0; g < counts.size(); ++g) idx[g] = gene_to_index(genome[g], counts[g]);
  return idx;
}

Placement placement_from_genome(const Problem& problem, std::span<const double> genome) {
  const auto idx = genome_to_candidate(problem, genome);
  const Horizon& h = problem.horizon();
  const std::size_t n_rec = problem.recurring().size();
  const std::size_t n_once = problem.once_off().size();
  Placement p;
  p.weekday.resize(n_rec);
  p.start_of_day.resize(n_rec);
  for (std::size_t r = 0; r < n_rec; ++r) {
    p.weekday[r] = problem.day_options(static_cast<int>(r))[idx[2 * r]];
    p.start_of_day[r] = h.working_start_slot_of_day + idx[2 * r + 1];
  }
  p.start_slot.resize(n_once);
  p.included.assign(n_once, 1);
  for (std::size_t o = 0; o < n_once; ++o) p.start_slot[o] = idx[2 * n_rec + o];
  return p;
}

Placement placement_from_schedule(const Problem& problem, const Schedule& schedule) {
  const std::size_t n_rec = problem.recurring().size();
  const std::size_t n_once = problem.once_off().size();
  if (schedule.recurring.size() != n_rec || schedule.once_off.size() != n_once) {
    throw std::invalid_argument("schedule does not cover every activity of the instance");
  }
  Placement p;
  p.weekday.resize(n_rec);
  p.start_of_day.resize(n_rec);
  for (std::size_t r = 0; r < n_rec; ++r) {
    p.weekday[r] = schedule.recurring[r].weekday;
    p.start_of_day[r] = schedule.recurring[r].start_slot_of_day;
  }
  p.start_slot.resize(n_once);
  p.included.resize(n_once);
  for (std::size_t o = 0; o < n_once; ++o) {
    p.start_slot[o] = schedule.once_off[o].start_slot;
    p.included[o] = schedule.once_off[o].scheduled ? 1 : 0;
  }
  return p;
}

namespace {

// Calendar day of an activity's (first) occurrence under a placement.
int placed_day(const Problem& problem, const Placement& p, int index) {
  const Horizon& h = problem.horizon();
  const int pos = problem.position(index);
  if (problem.activity(index).is_recurring()) return h.first_monday_day_index + p.weekday[pos];
  return h.day_of_slot(p.start_slot[pos]);
}

}  // namespace

bool enforce_precedence(const Problem& problem, Placement& p) {
  const Horizon& h = problem.horizon();
  for (int a : problem.repair_order()) {
    const auto preds = problem.predecessors(a);
    if (preds.empty()) continue;
    const Activity& act = problem.activity(a);
    const int pos = problem.position(a);
    if (!act.is_recurring() && !p.included[pos]) continue;

    int latest = std::numeric_limits<int>::min();
    bool blocked = false;
    for (int q : preds) {
      if (!problem.activity(q).is_recurring() && !p.included[problem.position(q)]) {
        blocked = true;
        break;
      }
      latest = std::max(latest, placed_day(problem, p, q));
    }
    if (act.is_recurring()) {
      if (placed_day(problem, p, a) <= latest) {
        p.weekday[pos] = latest + 1 - h.first_monday_day_index;
        if (p.weekday[pos] > 4) return false;
      }
    } else if (blocked) {
      p.included[pos] = 0;
    } else if (h.day_of_slot(p.start_slot[pos]) <= latest) {
      const int moved = (latest + 1) * h.slots_per_day + p.start_slot[pos] % h.slots_per_day;
      if (moved + act.duration_slots > h.n_slots) {
        p.included[pos] = 0;
      } else {
        p.start_slot[pos] = moved;
      }
    }
  }
  return true;
}

namespace {

// Room occupancy per slot as a bitset over the global room pool.
class RoomGrid {
 public:
  RoomGrid(int n_slots, int n_rooms)
      : words_((n_rooms + 63) / 64), n_rooms_(n_rooms), bits_(static_cast<std::size_t>(n_slots) * words_, 0) {}

  // Free rooms over every slot of the windows, written into `free` (one word per 64 rooms).
  void free_over(std::span<const std::pair<int, int>> windows, std::vector<std::uint64_t>& free) const {
    free.assign(words_, ~std::uint64_t{0});
    if (words_ > 0 && n_rooms_ % 64 != 0) free.back() = (std::uint64_t{1} << (n_rooms_ % 64)) - 1;
    for (const auto& [start, len] : windows) {
      for (int t = start; t < start + len; ++t) {
        const std::uint64_t* row = &bits_[static_cast<std::size_t>(t) * words_];
        for (int w = 0; w < words_; ++w) free[w] &= ~row[w];
      }
    }
  }

  static int count(const std::vector<std::uint64_t>& mask) {
    int c = 0;
    for (auto w : mask) c += std::popcount(w);
    return c;
  }

  // Takes the `need` lowest-id rooms of `free` over the windows.
  std::vector<int> take(std::span<const std::pair<int, int>> windows, const std::vector<std::uint64_t>& free,
                        int need) {
    std::vector<int> rooms;
    rooms.reserve(need);
    for (int w = 0; w < words_ && static_cast<int>(rooms.size()) < need; ++w) {
      std::uint64_t m = free[w];
      while (m != 0 && static_cast<int>(rooms.size()) < need) {
        const int bit = std::countr_zero(m);
        rooms.push_back(64 * w + bit);
        m &= m - 1;
      }
    }
    for (const auto& [start, len] : windows) {
      for (int t = start; t < start + len; ++t) {
        std::uint64_t* row = &bits_[static_cast<std::size_t>(t) * words_];
        for (int r : rooms) row[r / 64] |= std::uint64_t{1} << (r % 64);
      }
    }
    return rooms;
  }

 private:
  int words_;
  int n_rooms_;
  std::vector<std::uint64_t> bits_;
};

// Start times in [lo, hi] ordered by distance from `origin`, earlier first on ties.
template <class Fn>
bool for_each_nearest(int origin, int lo, int hi, Fn&& fn) {
  if (origin < lo || origin > hi) origin = std::clamp(origin, lo, hi);
  for (int d = 0;; ++d) {
    const bool below = origin - d >= lo;
    const bool above = d > 0 && origin + d <= hi;
    if (!below && !above) return false;
    if (below && fn(origin - d)) return true;
    if (above && fn(origin + d)) return true;
  }
}

}  // namespace

std::optional<Schedule> assign_rooms(const Problem& problem, const Placement& p) {
  const Instance& inst = problem.instance();
  const Horizon& h = inst.horizon;
  const int n_rooms_total = problem.total_rooms();

  Schedule s;
  s.recurring.resize(problem.recurring().size());
  s.once_off.resize(problem.once_off().size());
  for (std::size_t r = 0; r < s.recurring.size(); ++r) {
    s.recurring[r].id = problem.activity(problem.recurring()[r]).id;
    s.recurring[r].weekday = p.weekday[r];
    s.recurring[r].start_slot_of_day = p.start_of_day[r];
  }
  for (std::size_t o = 0; o < s.once_off.size(); ++o) {
    s.once_off[o].id = problem.activity(problem.once_off()[o]).id;
    s.once_off[o].start_slot = p.start_slot[o];
    s.once_off[o].scheduled = p.included[o] != 0;
  }

  RoomGrid grid(h.n_slots, n_rooms_total);
  std::vector<std::uint64_t> free;
  std::pair<int, int> windows[kRecurringWeeks];

  for (int a : problem.room_order_recurring()) {
    const Activity& act = problem.activity(a);
    if (act.n_rooms > n_rooms_total) return std::nullopt;
    RecurringAssignment& ra = s.recurring[problem.position(a)];
    const int lo = h.working_start_slot_of_day;
    const int hi = h.working_end_slot_of_day - act.duration_slots;
    const bool placed = for_each_nearest(ra.start_slot_of_day, lo, hi, [&](int start) {
      for (int w = 0; w < kRecurringWeeks; ++w) {
        windows[w] = {recurring_start_slot(h, ra.weekday, start, w), act.duration_slots};
      }
      grid.free_over(windows, free);
      if (RoomGrid::count(free) < act.n_rooms) return false;
      ra.start_slot_of_day = start;
      ra.rooms = grid.take(windows, free, act.n_rooms);
      return true;
    });
    if (!placed) return std::nullopt;
  }

  for (int a : problem.room_order_once_off()) {
    OnceOffAssignment& oa = s.once_off[problem.position(a)];
    if (!oa.scheduled) continue;
    const Activity& act = problem.activity(a);
    if (act.n_rooms > n_rooms_total) return std::nullopt;
    const int day = h.day_of_slot(oa.start_slot);
    const int lo = day * h.slots_per_day;
    const int hi = std::min((day + 1) * h.slots_per_day - 1, h.n_slots - act.duration_slots);
    const bool placed = for_each_nearest(oa.start_slot, lo, hi, [&](int start) {
      windows[0] = {start, act.duration_slots};
      grid.free_over(std::span(windows, 1), free);
      if (RoomGrid::count(free) < act.n_rooms) return false;
      oa.start_slot = start;
      oa.rooms = grid.take(std::span(windows, 1), free, act.n_rooms);
      return true;
    });
    if (!placed) return std::nullopt;
  }
  return s;
}

namespace {

// Energy cost minus value plus incurred penalty of one scheduled once-off activity.
double once_off_contribution(const Problem& problem, const Schedule& s, int once_pos) {
  const Instance& inst = problem.instance();
  const Activity& act = problem.activity(problem.once_off()[once_pos]);
  const OnceOffAssignment& o = s.once_off[once_pos];
  double energy = 0.0;
  for (int t = o.start_slot; t < o.start_slot + act.duration_slots; ++t) {
    energy += 0.25 * act.power_kw * inst.price.values[t] / 1000.0;
  }
  const bool outside = outside_working_hours(inst.horizon, o.start_slot, act.duration_slots);
  return energy - act.value + (outside ? act.penalty : 0.0);
}

}  // namespace

double once_off_benefit(const Problem& problem, const Schedule& schedule, int once_pos,
                        const std::vector<char>& kept) {
  double benefit = kept[once_pos] ? 0.0 : once_off_contribution(problem, schedule, once_pos);
  for (int anc : problem.once_off_ancestors(problem.once_off()[once_pos])) {
    const int q = problem.position(anc);
    if (!kept[q]) benefit += once_off_contribution(problem, schedule, q);
  }
  return benefit;
}

void prune_once_off(const Problem& problem, Schedule& schedule) {
  const int n_once = static_cast<int>(schedule.once_off.size());
  std::vector<double> contribution(n_once, 0.0);
  std::vector<char> candidate(n_once, 0);
  for (int o = 0; o < n_once; ++o) {
    if (!schedule.once_off[o].scheduled) continue;
    contribution[o] = once_off_contribution(problem, schedule, o);
    candidate[o] = 1;
  }

  std::vector<char> kept(n_once, 0);
  while (true) {
    int best = -1;
    double best_benefit = 0.0;
    for (int o = 0; o < n_once; ++o) {
      if (!candidate[o] || kept[o]) continue;
      double benefit = contribution[o];
      for (int anc : problem.once_off_ancestors(problem.once_off()[o])) {
        const int q = problem.position(anc);
        if (!kept[q]) benefit += contribution[q];
      }
      // Positions follow instance order, so ties fall to the earlier activity.
      if (benefit < best_benefit) {
        best_benefit = benefit;
        best = o;
      }
    }
    if (best < 0) break;
    kept[best] = 1;
    for (int anc : problem.once_off_ancestors(problem.once_off()[best])) kept[problem.position(anc)] = 1;
  }

  for (int o = 0; o < n_once; ++o) {
    if (candidate[o] && !kept[o]) {
      schedule.once_off[o].scheduled = false;
      schedule.once_off[o].rooms.clear();
    }
  }
}

EvaluatedIndividual repair_and_evaluate(const Problem& problem, Placement placement) {
  EvaluatedIndividual ind;
  if (!enforce_precedence(problem, placement)) return ind;
  auto schedule = assign_rooms(problem, placement);
  if (!schedule) return ind;
  prune_once_off(problem, *schedule);
  ind.cost = evaluate_schedule(problem.instance(), *schedule).total;
  ind.schedule = std::move(schedule);
  return ind;
}

EvaluatedIndividual decode_and_repair(const Problem& problem, std::span<const double> genome) {
  EvaluatedIndividual ind = repair_and_evaluate(problem, placement_from_genome(problem, genome));
  ind.genome.assign(genome.begin(), genome.end());
  return ind;
}

std::vector<std::string> schedule_violations(const Problem& problem, const Schedule& s) {
  std::vector<std::string> out;
  const Instance& inst = problem.instance();
  const Horizon& h = inst.horizon;
  const int total_rooms = problem.total_rooms();
  if (s.recurring.size() != problem.recurring().size() || s.once_off.size() != problem.once_off().size()) {
    out.push_back("schedule does not cover every activity");
    return out;
  }

  std::vector<std::vector<int>> slot_rooms(h.n_slots);
  const auto occupy = [&](int id, int start, int len, const std::vector<int>& rooms, int need) {
    if (static_cast<int>(rooms.size()) != need) {
      out.push_back("activity " + std::to_string(id) + ": holds " + std::to_string(rooms.size()) + " rooms, needs " +
                    std::to_string(need));
    }
    if (std::set<int>(rooms.begin(), rooms.end()).size() != rooms.size()) {
      out.push_back("activity " + std::to_string(id) + ": duplicate room ids");
    }
    for (int r : rooms) {
      if (r < 0 || r >= total_rooms) out.push_back("activity " + std::to_string(id) + ": unknown room");
    }
    for (int t = start; t < start + len; ++t) {
      if (t < 0 || t >= h.n_slots) {
        out.push_back("activity " + std::to_string(id) + ": runs outside the horizon");
        return;
      }
      slot_rooms[t].insert(slot_rooms[t].end(), rooms.begin(), rooms.end());
    }
  };

  for (std::size_t r = 0; r < s.recurring.size(); ++r) {
    const Activity& act = problem.activity(problem.recurring()[r]);
    const RecurringAssignment& ra = s.recurring[r];
    if (ra.id != act.id) out.push_back("recurring entries out of instance order");
    if (ra.weekday < 0 || ra.weekday > 4) out.push_back("activity " + std::to_string(act.id) + ": not on a weekday");
    if (ra.start_slot_of_day < h.working_start_slot_of_day ||
        ra.start_slot_of_day + act.duration_slots > h.working_end_slot_of_day) {
      out.push_back("activity " + std::to_string(act.id) + ": outside working hours");
    }
    for (int w = 0; w < kRecurringWeeks; ++w) {
      occupy(act.id, recurring_start_slot(h, ra.weekday, ra.start_slot_of_day, w), act.duration_slots, ra.rooms,
             act.n_rooms);
    }
  }
  for (std::size_t o = 0; o < s.once_off.size(); ++o) {
    const Activity& act = problem.activity(problem.once_off()[o]);
    const OnceOffAssignment& oa = s.once_off[o];
    if (oa.id != act.id) out.push_back("once-off entries out of instance order");
    if (!oa.scheduled) continue;
    occupy(act.id, oa.start_slot, act.duration_slots, oa.rooms, act.n_rooms);
  }
  for (int t = 0; t < h.n_slots; ++t) {
    auto& rooms = slot_rooms[t];
    std::sort(rooms.begin(), rooms.end());
    if (std::adjacent_find(rooms.begin(), rooms.end()) != rooms.end()) {
      out.push_back("slot " + std::to_string(t) + ": room double-booked");
    }
  }

  // Precedence: a scheduled activity runs at least one calendar day after each predecessor.
  const auto day_of = [&](int index) {
    const int pos = problem.position(index);
    if (problem.activity(index).is_recurring()) return h.first_monday_day_index + s.recurring[pos].weekday;
    return h.day_of_slot(s.once_off[pos].start_slot);
  };
  const auto scheduled = [&](int index) {
    return problem.activity(index).is_recurring() || s.once_off[problem.position(index)].scheduled;
  };
  for (int a = 0; a < static_cast<int>(inst.activities.size()); ++a) {
    if (!scheduled(a)) continue;
    for (int q : problem.predecessors(a)) {
      if (!scheduled(q)) {
        out.push_back("activity " + std::to_string(inst.activities[a].id) + ": predecessor not scheduled");
      } else if (day_of(q) + 1 > day_of(a)) {
        out.push_back("activity " + std::to_string(inst.activities[a].id) + ": precedence violated");
      }
    }
  }

  if (!s.battery_actions.empty()) {
    if (s.battery_actions.size() != inst.batteries.size()) {
      out.push_back("battery action table does not match the batteries");
    } else {
      for (std::size_t b = 0; b < inst.batteries.size(); ++b) {
        const auto& row = s.battery_actions[b];
        if (static_cast<int>(row.size()) != h.n_slots) {
          out.push_back("battery " + std::to_string(inst.batteries[b].id) + ": action row length");
          continue;
        }
        const int levels = soc_levels(inst.batteries[b]);
        int k = 0;
        for (int t = 0; t < h.n_slots; ++t) {
          k += static_cast<int>(row[t]);
          if (k < 0 || k > levels) {
            out.push_back("battery " + std::to_string(inst.batteries[b].id) + ": state of charge out of range at slot " +
                          std::to_string(t));
            break;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace campsched
