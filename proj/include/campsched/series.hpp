#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace campsched {

inline constexpr int kStepMinutes = 15;

using Timestamp = std::chrono::sys_seconds;

/// Malformed input file (CSV or JSON syntax, missing keys, bad timestamps).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Regular 15-minute time series. Slot k covers [start + 15k min, start + 15(k+1) min).
struct SeriesFrame {
  Timestamp start{};
  int step_minutes = kStepMinutes;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] Timestamp timestamp_at(std::size_t slot) const;

  bool operator==(const SeriesFrame&) const = default;
};

/// Parses "YYYY-MM-DDTHH:MM[:SS]" (a space separator and a trailing 'Z' are accepted).
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

/// Weekday of a timestamp, 0 = Monday.
int weekday_of(Timestamp ts);

SeriesFrame read_series_csv(std::istream& in);
SeriesFrame read_series_csv(const std::filesystem::path& path);
void write_series_csv(std::ostream& out, const SeriesFrame& series);
void write_series_csv(const std::filesystem::path& path, const SeriesFrame& series);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace campsched
