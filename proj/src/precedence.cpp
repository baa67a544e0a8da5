#include "campsched/precedence.hpp"

#include <algorithm>
#include <unordered_map>

namespace campsched {

PrecedenceInfo compute_levels(const Instance& instance) {
  const auto& acts = instance.activities;
  const std::size_t n = acts.size();
  std::unordered_map<int, int> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(acts[i].id, static_cast<int>(i));

  std::vector<std::vector<int>> succ(n);
  std::vector<int> indeg(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int p : acts[i].precedences) {
      const auto it = index.find(p);
      if (it == index.end()) throw ValidationError("unknown precedence id " + std::to_string(p));
      succ[it->second].push_back(static_cast<int>(i));
      ++indeg[i];
    }
  }

  // Kahn order, smallest index first so the order is reproducible.
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  }
  std::make_heap(ready.begin(), ready.end(), std::greater<>{});
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), std::greater<>{});
    const int v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (int w : succ[v]) {
      if (--indeg[w] == 0) {
        ready.push_back(w);
        std::push_heap(ready.begin(), ready.end(), std::greater<>{});
      }
    }
  }
  if (order.size() != n) throw ValidationError("precedence cycle");

  PrecedenceInfo info{std::vector<int>(n, 0), std::vector<int>(n, 0)};
  for (int v : order) {
    for (int w : succ[v]) info.level[w] = std::max(info.level[w], info.level[v] + 1);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (int w : succ[*it]) info.level_after[*it] = std::max(info.level_after[*it], info.level_after[w] + 1);
  }
  return info;
}

std::vector<int> allowed_weekdays(int level, int level_after) {
  std::vector<int> days;
  for (int d = level; d <= 4 - level_after; ++d) days.push_back(d);
  return days;
}

}  // namespace campsched
