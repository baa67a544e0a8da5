#pragma once

// Independent reference implementations used by the unit and acceptance tests. They
// favour obviousness over speed and share no code with the library beyond its types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "campsched/instance.hpp"
#include "campsched/schedule.hpp"
#include "campsched/series.hpp"

namespace oracle {

using namespace campsched;

// Is activity `a` (assignment fields passed in) running at absolute slot t?
inline bool recurring_runs_at(const Horizon& h, const Activity& a, const RecurringAssignment& r, int t) {
  const int day = t / 96;
  const int tod = t % 96;
  for (int week = 0; week < 4; ++week) {
    if (day == h.first_monday_day_index + 7 * week + r.weekday && tod >= r.start_slot_of_day &&
        tod < r.start_slot_of_day + a.duration_slots) {
      return true;
    }
  }
  return false;
}

inline double battery_kw(const Battery& b, int action) {
  if (action > 0) return b.max_power_kw;
  if (action < 0) return -b.max_power_kw * std::sqrt(b.efficiency);
  return 0.0;
}

// Slot-by-slot load: asks every activity whether it runs at t.
inline std::vector<double> load(const Instance& inst, const Schedule& s) {
  std::vector<double> out;
  for (int t = 0; t < inst.horizon.n_slots; ++t) {
    double l = inst.base_load.values[t];
    int r = 0;
    int o = 0;
    for (const Activity& a : inst.activities) {
      if (a.kind == ActivityKind::recurring) {
        if (recurring_runs_at(inst.horizon, a, s.recurring[r++], t)) l += a.power_kw;
      } else {
        const OnceOffAssignment& x = s.once_off[o++];
        if (x.scheduled && t >= x.start_slot && t < x.start_slot + a.duration_slots) l += a.power_kw;
      }
    }
    for (std::size_t b = 0; b < s.battery_actions.size(); ++b) {
      l += battery_kw(inst.batteries[b], static_cast<int>(s.battery_actions[b][t]));
    }
    out.push_back(l);
  }
  return out;
}

// Written out directly: energy, squared peak, then value minus penalty of each scheduled
// once-off activity, with "inside" meaning every occupied slot is a weekday slot in 9-17.
inline double cost(const Instance& inst, const Schedule& s, const std::vector<double>& l) {
  double energy = 0.0;
  double peak = -1e300;
  for (std::size_t t = 0; t < l.size(); ++t) {
    energy += l[t] * inst.price.values[t] * 0.25 / 1000.0;
    peak = std::max(peak, l[t]);
  }
  double reward = 0.0;
  int o = 0;
  for (const Activity& a : inst.activities) {
    if (a.kind != ActivityKind::once_off) continue;
    const OnceOffAssignment& x = s.once_off[o++];
    if (!x.scheduled) continue;
    bool inside = true;
    for (int t = x.start_slot; t < x.start_slot + a.duration_slots; ++t) {
      const int wd = (inst.horizon.first_weekday + t / 96) % 7;
      const int tod = t % 96;
      if (wd >= 5 || tod < inst.horizon.working_start_slot_of_day || tod >= inst.horizon.working_end_slot_of_day) {
        inside = false;
      }
    }
    reward += a.value - (inside ? 0.0 : a.penalty);
  }
  if (l.empty()) peak = 0.0;
  return energy + 0.005 * peak * peak - reward;
}

inline double cost(const Instance& inst, const Schedule& s) { return cost(inst, s, load(inst, s)); }

// Longest path lengths by enumerating every path from every node.
inline void longest_chains(int n, const std::vector<std::pair<int, int>>& edges, std::vector<int>& level,
                           std::vector<int>& level_after) {
  level.assign(n, 0);
  level_after.assign(n, 0);
  std::function<void(int, int, int)> walk = [&](int start, int node, int len) {
    level_after[start] = std::max(level_after[start], len);
    level[node] = std::max(level[node], len);
    for (const auto& [p, q] : edges) {
      if (p == node) walk(start, q, len + 1);
    }
  };
  for (int v = 0; v < n; ++v) walk(v, v, 0);
}

// Weekdays on which `node` can sit in some Mon..Fri placement of the whole DAG where
// every edge p -> q has day(p) < day(q).
inline std::set<int> placeable_weekdays(int n, const std::vector<std::pair<int, int>>& edges, int node) {
  std::set<int> days;
  std::vector<int> day(n, 0);
  std::function<void(int)> assign = [&](int v) {
    if (v == n) {
      for (const auto& [p, q] : edges) {
        if (day[p] >= day[q]) return;
      }
      days.insert(day[node]);
      return;
    }
    for (int d = 0; d < 5; ++d) {
      day[v] = d;
      assign(v + 1);
    }
  };
  assign(0);
  return days;
}

// Every charge/hold/discharge sequence of one battery from empty, by base-3 counting.
inline double best_single_battery(const Battery& b, const std::vector<double>& residual,
                                  const std::vector<double>& price) {
  const int n = static_cast<int>(residual.size());
  const int levels = static_cast<int>(std::floor(b.capacity_kwh / (0.25 * b.max_power_kw) + 1e-9));
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  double best = 1e300;
  for (int code = 0; code < combos; ++code) {
    int c = code;
    int k = 0;
    bool ok = true;
    std::vector<double> l = residual;
    for (int t = 0; t < n; ++t) {
      const int action = c % 3 - 1;
      c /= 3;
      k += action;
      if (k < 0 || k > levels) {
        ok = false;
        break;
      }
      l[t] += battery_kw(b, action);
    }
    if (!ok) continue;
    double e = 0.0;
    double peak = -1e300;
    for (int t = 0; t < n; ++t) {
      e += 0.25 * l[t] * price[t] / 1000.0;
      peak = std::max(peak, l[t]);
    }
    best = std::min(best, e + 0.005 * peak * peak);
  }
  return best;
}

// Joint optimum of two batteries over 9^T combinations.
inline double best_two_batteries(const Battery& a, const Battery& b, const std::vector<double>& load,
                                 const std::vector<double>& price) {
  const int n = static_cast<int>(load.size());
  const int la = static_cast<int>(std::floor(a.capacity_kwh / (0.25 * a.max_power_kw) + 1e-9));
  const int lb = static_cast<int>(std::floor(b.capacity_kwh / (0.25 * b.max_power_kw) + 1e-9));
  long combos = 1;
  for (int i = 0; i < n; ++i) combos *= 9;
  double best = 1e300;
  for (long code = 0; code < combos; ++code) {
    long c = code;
    int ka = 0;
    int kb = 0;
    bool ok = true;
    double e = 0.0;
    double peak = -1e300;
    for (int t = 0; t < n && ok; ++t) {
      const int xa = static_cast<int>(c % 3) - 1;
      const int xb = static_cast<int>(c / 3 % 3) - 1;
      c /= 9;
      ka += xa;
      kb += xb;
      if (ka < 0 || ka > la || kb < 0 || kb > lb) ok = false;
      const double l = load[t] + battery_kw(a, xa) + battery_kw(b, xb);
      e += 0.25 * l * price[t] / 1000.0;
      peak = std::max(peak, l);
    }
    if (ok) best = std::min(best, e + 0.005 * peak * peak);
  }
  return best;
}

// Feasibility restated from the model: room pool per slot, rooms per activity, weekday
// working hours for recurring runs, one clear day after every predecessor, horizon.
inline std::vector<std::string> violations(const Instance& inst, const Schedule& s) {
  std::vector<std::string> out;
  const Horizon& h = inst.horizon;
  int pool = 0;
  for (const Building& b : inst.buildings) pool += b.n_rooms;
  std::map<int, int> day_of;
  std::map<int, bool> on;
  std::vector<std::map<int, int>> used(h.n_slots);
  int r = 0;
  int o = 0;
  for (const Activity& a : inst.activities) {
    std::vector<int> slots;
    const std::vector<int>* rooms = nullptr;
    if (a.kind == ActivityKind::recurring) {
      const RecurringAssignment& x = s.recurring[r++];
      if (x.id != a.id) out.push_back("order");
      if (x.weekday < 0 || x.weekday > 4) out.push_back("weekday");
      if (x.start_slot_of_day < h.working_start_slot_of_day ||
          x.start_slot_of_day + a.duration_slots > h.working_end_slot_of_day) {
        out.push_back("working hours");
      }
      for (int week = 0; week < 4; ++week) {
        const int day = h.first_monday_day_index + 7 * week + x.weekday;
        for (int tod = x.start_slot_of_day; tod < x.start_slot_of_day + a.duration_slots; ++tod) {
          if (day * 96 + tod < h.n_slots) slots.push_back(day * 96 + tod);
        }
      }
      if (static_cast<int>(slots.size()) != 4 * a.duration_slots) out.push_back("recurring occurrences");
      day_of[a.id] = h.first_monday_day_index + x.weekday;
      on[a.id] = true;
      rooms = &x.rooms;
    } else {
      const OnceOffAssignment& x = s.once_off[o++];
      if (x.id != a.id) out.push_back("order");
      on[a.id] = x.scheduled;
      if (!x.scheduled) continue;
      if (x.start_slot < 0 || x.start_slot + a.duration_slots > h.n_slots) {
        out.push_back("horizon");
        continue;
      }
      for (int t = x.start_slot; t < x.start_slot + a.duration_slots; ++t) slots.push_back(t);
      day_of[a.id] = x.start_slot / 96;
      rooms = &x.rooms;
    }
    if (static_cast<int>(rooms->size()) != a.n_rooms) out.push_back("room count");
    for (int room : *rooms) {
      if (room < 0 || room >= pool) out.push_back("room id");
      for (int t : slots) {
        if (++used[t][room] > 1) out.push_back("double booking");
      }
    }
  }
  for (const Activity& a : inst.activities) {
    if (!on[a.id]) continue;
    for (int p : a.precedences) {
      if (!on[p]) {
        out.push_back("missing predecessor");
      } else if (day_of[p] >= day_of[a.id]) {
        out.push_back("precedence");
      }
    }
  }
  return out;
}

// Hand-built instance over whole days starting on Monday 2021-03-01.
inline Instance make_instance(std::vector<Activity> activities, int n_rooms, int n_days = 28,
                              std::uint64_t seed = 1, std::vector<Battery> batteries = {}) {
  Instance inst;
  inst.name = "tiny";
  inst.horizon.n_slots = 96 * n_days;
  inst.horizon.first_weekday = 0;
  inst.horizon.first_monday_day_index = 0;
  inst.buildings = {Building{0, n_rooms}};
  inst.batteries = std::move(batteries);
  inst.activities = std::move(activities);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> price(20.0, 120.0);
  std::uniform_real_distribution<double> base(50.0, 150.0);
  const Timestamp start = parse_timestamp("2021-03-01T00:00");
  inst.price = SeriesFrame{start, 15, {}};
  inst.base_load = SeriesFrame{start, 15, {}};
  for (int t = 0; t < inst.horizon.n_slots; ++t) {
    inst.price.values.push_back(price(rng));
    inst.base_load.values.push_back(base(rng));
  }
  return inst;
}

inline Activity recurring(int id, double kw, int dur, int rooms, std::vector<int> preds = {}) {
  Activity a;
  a.id = id;
  a.kind = ActivityKind::recurring;
  a.power_kw = kw;
  a.duration_slots = dur;
  a.n_rooms = rooms;
  a.precedences = std::move(preds);
  return a;
}

inline Activity once_off(int id, double kw, int dur, int rooms, double value, double penalty,
                         std::vector<int> preds = {}) {
  Activity a;
  a.id = id;
  a.kind = ActivityKind::once_off;
  a.power_kw = kw;
  a.duration_slots = dur;
  a.n_rooms = rooms;
  a.value = value;
  a.penalty = penalty;
  a.precedences = std::move(preds);
  return a;
}

}  // namespace oracle
