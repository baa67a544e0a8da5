#include "campsched/problem.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace campsched {

Problem::Problem(Instance instance) : instance_(std::move(instance)) {
  validate_instance(instance_);
  precedence_ = compute_levels(instance_);
  total_rooms_ = instance_.total_rooms();

  const auto& acts = instance_.activities;
  const int n = static_cast<int>(acts.size());
  position_.resize(n);
  std::unordered_map<int, int> index;
  for (int i = 0; i < n; ++i) {
    index.emplace(acts[i].id, i);
    auto& list = acts[i].is_recurring() ? recurring_ : once_off_;
    position_[i] = static_cast<int>(list.size());
    list.push_back(i);
  }

  predecessors_.resize(n);
  successors_.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int p : acts[i].precedences) {
      const int pi = index.at(p);
      predecessors_[i].push_back(pi);
      successors_[pi].push_back(i);
    }
    std::sort(predecessors_[i].begin(), predecessors_[i].end());
    predecessors_[i].erase(std::unique(predecessors_[i].begin(), predecessors_[i].end()), predecessors_[i].end());
  }
  for (auto& s : successors_) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }

  repair_order_.resize(n);
  std::iota(repair_order_.begin(), repair_order_.end(), 0);
  std::sort(repair_order_.begin(), repair_order_.end(), [&](int a, int b) {
    if (precedence_.level[a] != precedence_.level[b]) return precedence_.level[a] < precedence_.level[b];
    return acts[a].id < acts[b].id;
  });

  // Ancestors in level order: a predecessor's set is complete before it is needed.
  once_off_ancestors_.resize(n);
  for (int a : repair_order_) {
    std::vector<int> anc;
    for (int p : predecessors_[a]) {
      if (!acts[p].is_recurring()) anc.push_back(p);
      anc.insert(anc.end(), once_off_ancestors_[p].begin(), once_off_ancestors_[p].end());
    }
    std::sort(anc.begin(), anc.end());
    anc.erase(std::unique(anc.begin(), anc.end()), anc.end());
    once_off_ancestors_[a] = std::move(anc);
  }

  const auto by_footprint = [&](int a, int b) {
    const long fa = static_cast<long>(acts[a].duration_slots) * acts[a].n_rooms;
    const long fb = static_cast<long>(acts[b].duration_slots) * acts[b].n_rooms;
    if (fa != fb) return fa > fb;
    return acts[a].id < acts[b].id;
  };
  room_order_recurring_ = recurring_;
  std::sort(room_order_recurring_.begin(), room_order_recurring_.end(), by_footprint);
  room_order_once_off_ = once_off_;
  std::sort(room_order_once_off_.begin(), room_order_once_off_.end(), by_footprint);

  for (int a : recurring_) {
    auto days = allowed_weekdays(precedence_.level[a], precedence_.level_after[a]);
    if (days.empty()) {
      throw ValidationError("unschedulable instance: activity " + std::to_string(acts[a].id) +
                            " has no admissible weekday");
    }
    day_options_.push_back(std::move(days));
  }
}

int Problem::index_of_id(int id) const {
  const auto& acts = instance_.activities;
  for (int i = 0; i < static_cast<int>(acts.size()); ++i) {
    if (acts[i].id == id) return i;
  }
  throw std::out_of_range("unknown activity id " + std::to_string(id));
}

int Problem::time_options_recurring(int rec_pos) const {
  const Activity& a = instance_.activities[recurring_[rec_pos]];
  return instance_.horizon.working_slots_per_day() - a.duration_slots + 1;
}

int Problem::time_options_once_off(int once_pos) const {
  const Activity& a = instance_.activities[once_off_[once_pos]];
  return instance_.horizon.n_slots - a.duration_slots + 1;
}

}  // namespace campsched
