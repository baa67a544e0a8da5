#pragma once

#include <span>
#include <vector>

#include "campsched/instance.hpp"
#include "campsched/precedence.hpp"

namespace campsched {

/// A validated instance plus the derived indices every optimisation stage needs:
/// activity lists per kind, adjacency, precedence levels and processing orders.
/// Activities are addressed by their index in Instance::activities; "positions" index
/// into the recurring() / once_off() lists.
class Problem {
 public:
  /// Validates the instance; throws ValidationError("unschedulable instance ...") when a
  /// recurring activity has no admissible weekday.
  explicit Problem(Instance instance);

  [[nodiscard]] const Instance& instance() const noexcept { return instance_; }
  [[nodiscard]] const Horizon& horizon() const noexcept { return instance_.horizon; }
  [[nodiscard]] const Activity& activity(int index) const { return instance_.activities[index]; }
  [[nodiscard]] const PrecedenceInfo& precedence() const noexcept { return precedence_; }
  [[nodiscard]] int total_rooms() const noexcept { return total_rooms_; }

  [[nodiscard]] std::span<const int> recurring() const noexcept { return recurring_; }
  [[nodiscard]] std::span<const int> once_off() const noexcept { return once_off_; }
  /// Position of an activity inside recurring() or once_off(), by its kind.
  [[nodiscard]] int position(int index) const { return position_[index]; }
  [[nodiscard]] int index_of_id(int id) const;

  [[nodiscard]] std::span<const int> predecessors(int index) const { return predecessors_[index]; }
  [[nodiscard]] std::span<const int> successors(int index) const { return successors_[index]; }
  /// Transitive once-off ancestors of an activity (activity indices, ascending).
  [[nodiscard]] std::span<const int> once_off_ancestors(int index) const { return once_off_ancestors_[index]; }

  /// Ascending precedence level, ties by ascending id.
  [[nodiscard]] std::span<const int> repair_order() const noexcept { return repair_order_; }
  /// Room assignment order within a kind: duration * n_rooms descending, ties by ascending id.
  [[nodiscard]] std::span<const int> room_order_recurring() const noexcept { return room_order_recurring_; }
  [[nodiscard]] std::span<const int> room_order_once_off() const noexcept { return room_order_once_off_; }

  /// Admissible weekdays of a recurring activity (by recurring position).
  [[nodiscard]] std::span<const int> day_options(int rec_pos) const { return day_options_[rec_pos]; }
  /// Start times of a recurring activity within the working day.
  [[nodiscard]] int time_options_recurring(int rec_pos) const;
  /// Absolute start slots of a once-off activity.
  [[nodiscard]] int time_options_once_off(int once_pos) const;

 private:
  Instance instance_;
  PrecedenceInfo precedence_;
  int total_rooms_ = 0;
  std::vector<int> recurring_;
  std::vector<int> once_off_;
  std::vector<int> position_;
  std::vector<std::vector<int>> predecessors_;
  std::vector<std::vector<int>> successors_;
  std::vector<std::vector<int>> once_off_ancestors_;
  std::vector<int> repair_order_;
  std::vector<int> room_order_recurring_;
  std::vector<int> room_order_once_off_;
  std::vector<std::vector<int>> day_options_;
};

}  // namespace campsched
