#pragma once

#include <vector>

#include "campsched/instance.hpp"

namespace campsched {

/// Longest-chain depths over the precedence DAG, indexed like Instance::activities.
struct PrecedenceInfo {
  std::vector<int> level;        // longest predecessor chain ending at the activity
  std::vector<int> level_after;  // longest successor chain starting at the activity

  bool operator==(const PrecedenceInfo&) const = default;
};

/// Throws ValidationError("precedence cycle") if the graph is not a DAG.
PrecedenceInfo compute_levels(const Instance& instance);

/// Weekdays (0 = Monday .. 4 = Friday) left after removing the first `level` and the
/// last `level_after` working days. Empty when level + level_after > 4.
std::vector<int> allowed_weekdays(int level, int level_after);

}  // namespace campsched
