#include "campsched/battery.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "campsched/objective.hpp"

namespace campsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<BatteryAction, 3> kActions = {BatteryAction::discharge, BatteryAction::hold,
                                                   BatteryAction::charge};

// Per-slot action data for one battery: grid effect and energy cost of each action.
struct SlotTable {
  int n_slots = 0;
  int levels = 0;
  std::array<double, 3> effect{};
  std::vector<std::array<double, 3>> load;    // residual + effect
  std::vector<std::array<double, 3>> energy;  // 0.25 * price * load / 1000
};

SlotTable make_table(const Battery& b, std::span<const double> residual, std::span<const double> price) {
  SlotTable tab;
  tab.n_slots = static_cast<int>(residual.size());
  tab.levels = soc_levels(b);
  for (int a = 0; a < 3; ++a) tab.effect[a] = grid_effect_kw(b, kActions[a]);
  tab.load.resize(residual.size());
  tab.energy.resize(residual.size());
  for (std::size_t t = 0; t < residual.size(); ++t) {
    for (int a = 0; a < 3; ++a) {
      tab.load[t][a] = residual[t] + tab.effect[a];
      tab.energy[t][a] = 0.25 * price[t] * tab.load[t][a] / 1000.0;
    }
  }
  return tab;
}

// Minimum energy cost over all sequences, ignoring the peak.
double unconstrained_energy(const SlotTable& tab) {
  const int k_max = tab.levels;
  std::vector<double> cur(k_max + 1, kInf), nxt(k_max + 1);
  cur[0] = 0.0;
  for (int t = 0; t < tab.n_slots; ++t) {
    std::fill(nxt.begin(), nxt.end(), kInf);
    for (int k = 0; k <= k_max; ++k) {
      if (cur[k] == kInf) continue;
      for (int a = 0; a < 3; ++a) {
        const int k2 = k + a - 1;
        if (k2 < 0 || k2 > k_max) continue;
        nxt[k2] = std::min(nxt[k2], cur[k] + tab.energy[t][a]);
      }
    }
    std::swap(cur, nxt);
  }
  return *std::min_element(cur.begin(), cur.end());
}

// Some sequence keeps every slot's load <= cap.
bool cap_feasible(const SlotTable& tab, double cap) {
  const int k_max = tab.levels;
  std::vector<char> cur(k_max + 1, 0), nxt(k_max + 1);
  cur[0] = 1;
  for (int t = 0; t < tab.n_slots; ++t) {
    std::fill(nxt.begin(), nxt.end(), 0);
    bool any = false;
    for (int k = 0; k <= k_max; ++k) {
      if (!cur[k]) continue;
      for (int a = 0; a < 3; ++a) {
        const int k2 = k + a - 1;
        if (k2 < 0 || k2 > k_max || tab.load[t][a] > cap) continue;
        nxt[k2] = 1;
        any = true;
      }
    }
    if (!any) return false;
    std::swap(cur, nxt);
  }
  return true;
}

// Cheapest-energy sequence whose peak load is exactly `cap`; empty when none exists.
std::vector<BatteryAction> solve_for_cap(const SlotTable& tab, double cap, double& energy_out) {
  const int k_max = tab.levels;
  const int width = 2 * (k_max + 1);
  const auto state = [&](int k, int hit) { return 2 * k + hit; };
  std::vector<double> cur(width, kInf), nxt(width);
  // parent: action index (2 bits) and previous "hit" flag (1 bit); 0xFF = unreachable
  std::vector<std::uint8_t> parent(static_cast<std::size_t>(tab.n_slots) * width, 0xFF);
  cur[state(0, 0)] = 0.0;
  for (int t = 0; t < tab.n_slots; ++t) {
    std::fill(nxt.begin(), nxt.end(), kInf);
    std::uint8_t* par = &parent[static_cast<std::size_t>(t) * width];
    for (int k = 0; k <= k_max; ++k) {
      for (int hit = 0; hit < 2; ++hit) {
        const double base = cur[state(k, hit)];
        if (base == kInf) continue;
        for (int a = 0; a < 3; ++a) {
          const int k2 = k + a - 1;
          const double load = tab.load[t][a];
          if (k2 < 0 || k2 > k_max || load > cap) continue;
          const int hit2 = hit | (load == cap ? 1 : 0);
          const double v = base + tab.energy[t][a];
          if (v < nxt[state(k2, hit2)]) {
            nxt[state(k2, hit2)] = v;
            par[state(k2, hit2)] = static_cast<std::uint8_t>(a | (hit << 2));
          }
        }
      }
    }
    std::swap(cur, nxt);
  }
  int best_k = -1;
  for (int k = 0; k <= k_max; ++k) {
    if (cur[state(k, 1)] < kInf && (best_k < 0 || cur[state(k, 1)] < cur[state(best_k, 1)])) best_k = k;
  }
  if (best_k < 0) return {};
  energy_out = cur[state(best_k, 1)];
  std::vector<BatteryAction> actions(tab.n_slots);
  int k = best_k;
  int hit = 1;
  for (int t = tab.n_slots - 1; t >= 0; --t) {
    const std::uint8_t code = parent[static_cast<std::size_t>(t) * width + state(k, hit)];
    const int a = code & 3;
    actions[t] = kActions[a];
    k -= a - 1;
    hit = (code >> 2) & 1;
  }
  return actions;
}

std::vector<double> apply_actions(const Battery& b, std::span<const double> residual,
                                  std::span<const BatteryAction> actions) {
  std::vector<double> load(residual.begin(), residual.end());
  for (std::size_t t = 0; t < load.size(); ++t) load[t] += grid_effect_kw(b, actions[t]);
  return load;
}

}  // namespace

std::vector<BatteryAction> single_battery_best_response(const Battery& battery, std::span<const double> residual,
                                                        std::span<const double> price) {
  if (residual.size() != price.size()) throw std::invalid_argument("residual and price lengths differ");
  const std::size_t n = residual.size();
  std::vector<BatteryAction> best(n, BatteryAction::hold);
  if (n == 0 || soc_levels(battery) == 0) return best;

  const SlotTable tab = make_table(battery, residual, price);
  double incumbent = energy_and_peak_cost(residual, price);

  std::vector<double> caps;
  caps.reserve(3 * n);
  for (const auto& row : tab.load) caps.insert(caps.end(), row.begin(), row.end());
  std::sort(caps.begin(), caps.end());
  caps.erase(std::unique(caps.begin(), caps.end()), caps.end());

  // Smallest cap that admits any sequence; hold-only is always admissible at the top.
  std::size_t lo = 0;
  std::size_t hi = caps.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cap_feasible(tab, caps[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  caps.erase(caps.begin(), caps.begin() + static_cast<long>(lo));
  std::stable_sort(caps.begin(), caps.end(), [](double a, double b) { return a * a < b * b; });

  const double floor_energy = unconstrained_energy(tab);
  for (double cap : caps) {
    if (floor_energy + kPeakTariff * cap * cap >= incumbent) break;
    double energy = 0.0;
    auto actions = solve_for_cap(tab, cap, energy);
    if (actions.empty()) continue;
    const double total = energy_and_peak_cost(apply_actions(battery, residual, actions), price);
    if (total < incumbent) {
      incumbent = total;
      best = std::move(actions);
    }
  }
  return best;
}

std::vector<double> soc_trajectory(const Battery& battery, std::span<const BatteryAction> actions) {
  const int levels = soc_levels(battery);
  const double step = soc_step_kwh(battery);
  std::vector<double> soc(actions.size());
  int k = 0;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    k += static_cast<int>(actions[t]);
    if (k < 0 || k > levels) throw std::invalid_argument("battery action sequence leaves the state-of-charge range");
    soc[t] = k * step;
  }
  return soc;
}

namespace {

DispatchPlan make_plan(std::span<const Battery> batteries, std::span<const double> load, std::span<const double> price,
                       std::vector<std::vector<BatteryAction>> actions, Timestamp start) {
  DispatchPlan plan;
  plan.resulting_load = SeriesFrame{start, kStepMinutes, std::vector<double>(load.begin(), load.end())};
  for (std::size_t b = 0; b < batteries.size(); ++b) {
    plan.soc.push_back(soc_trajectory(batteries[b], actions[b]));
    for (std::size_t t = 0; t < load.size(); ++t) {
      plan.resulting_load.values[t] += grid_effect_kw(batteries[b], actions[b][t]);
    }
  }
  plan.actions = std::move(actions);
  plan.cost = energy_and_peak_cost(plan.resulting_load.values, price);
  return plan;
}

}  // namespace

DispatchPlan optimize_dispatch(const Instance& instance, const SeriesFrame& activity_load, int max_rounds) {
  const auto& batteries = instance.batteries;
  const auto& price = instance.price.values;
  const auto& base = activity_load.values;
  if (base.size() != price.size()) throw std::invalid_argument("load length does not match the price series");
  const std::size_t n_bat = batteries.size();
  const std::size_t n = base.size();

  std::vector<std::vector<BatteryAction>> actions(n_bat, std::vector<BatteryAction>(n, BatteryAction::hold));
  double cost = energy_and_peak_cost(base, price);

  std::vector<std::vector<BatteryAction>> solo(n_bat);
  std::vector<double> solo_cost(n_bat);
  for (std::size_t b = 0; b < n_bat; ++b) {
    solo[b] = single_battery_best_response(batteries[b], base, price);
    solo_cost[b] = energy_and_peak_cost(apply_actions(batteries[b], base, solo[b]), price);
  }
  std::vector<std::size_t> order(n_bat);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return solo_cost[a] < solo_cost[b]; });

  for (int round = 0; round < max_rounds; ++round) {
    bool improved = false;
    for (std::size_t b : order) {
      std::vector<double> residual(base);
      bool others_hold = true;
      for (std::size_t c = 0; c < n_bat; ++c) {
        if (c == b) continue;
        for (std::size_t t = 0; t < n; ++t) residual[t] += grid_effect_kw(batteries[c], actions[c][t]);
        others_hold = others_hold && std::all_of(actions[c].begin(), actions[c].end(),
                                                 [](BatteryAction a) { return a == BatteryAction::hold; });
      }
      auto response = others_hold ? solo[b] : single_battery_best_response(batteries[b], residual, price);
      auto candidate = apply_actions(batteries[b], residual, response);
      const double c = energy_and_peak_cost(candidate, price);
      if (c < cost) {
        cost = c;
        actions[b] = std::move(response);
        improved = true;
      }
    }
    if (!improved) break;
  }
  return make_plan(batteries, base, price, std::move(actions), activity_load.start);
}

DispatchPlan brute_force_dispatch(std::span<const Battery> batteries, std::span<const double> load,
                                  std::span<const double> price) {
  const std::size_t n = load.size();
  if (n > 7) throw std::invalid_argument("brute_force_dispatch handles at most 7 slots");
  if (price.size() != n) throw std::invalid_argument("load and price lengths differ");
  const std::size_t dims = batteries.size() * n;
  if (dims > 14) throw std::invalid_argument("brute_force_dispatch: too many combinations");

  std::vector<int> levels;
  for (const Battery& b : batteries) levels.push_back(soc_levels(b));
  std::vector<std::vector<BatteryAction>> cur(batteries.size(), std::vector<BatteryAction>(n, BatteryAction::hold));
  std::vector<std::vector<BatteryAction>> best = cur;
  std::vector<double> total(load.begin(), load.end());
  std::vector<int> soc(batteries.size(), 0);
  double best_cost = kInf;

  // Depth-first over (slot, battery) pairs, slot-major so state-of-charge limits prune early.
  std::function<void(std::size_t)> visit = [&](std::size_t depth) {
    if (depth == dims) {
      std::copy(load.begin(), load.end(), total.begin());
      for (std::size_t bb = 0; bb < batteries.size(); ++bb) {
        for (std::size_t tt = 0; tt < n; ++tt) total[tt] += grid_effect_kw(batteries[bb], cur[bb][tt]);
      }
      const double c = energy_and_peak_cost(total, price);
      if (c < best_cost) {
        best_cost = c;
        best = cur;
      }
      return;
    }
    const std::size_t t = depth / batteries.size();
    const std::size_t b = depth % batteries.size();
    for (BatteryAction a : kActions) {
      const int k = soc[b] + static_cast<int>(a);
      if (k < 0 || k > levels[b]) continue;
      soc[b] = k;
      cur[b][t] = a;
      visit(depth + 1);
      soc[b] = k - static_cast<int>(a);
    }
    cur[b][t] = BatteryAction::hold;
  };
  visit(0);
  return make_plan(batteries, load, price, std::move(best), Timestamp{});
}

}  // namespace campsched
