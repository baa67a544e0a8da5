#include "campsched/series.hpp"

#include <array>
#include <cstdio>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace campsched {

namespace {

using namespace std::chrono;

int parse_int_field(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw ParseError("truncated timestamp '" + std::string(text) + "'");
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc{} || ptr != text.data() + pos + len) {
    throw ParseError("bad timestamp '" + std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Timestamp SeriesFrame::timestamp_at(std::size_t slot) const {
  return start + minutes(static_cast<long>(step_minutes) * static_cast<long>(slot));
}

Timestamp parse_timestamp(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  // YYYY-MM-DDTHH:MM[:SS]
  if (text.size() != 16 && text.size() != 19) {
    throw ParseError("bad timestamp '" + std::string(text) + "'");
  }
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
      (text.size() == 19 && text[16] != ':')) {
    throw ParseError("bad timestamp '" + std::string(text) + "'");
  }
  const int y = parse_int_field(text, 0, 4);
  const int mo = parse_int_field(text, 5, 2);
  const int d = parse_int_field(text, 8, 2);
  const int h = parse_int_field(text, 11, 2);
  const int mi = parse_int_field(text, 14, 2);
  const int s = text.size() == 19 ? parse_int_field(text, 17, 2) : 0;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw ParseError("bad timestamp '" + std::string(text) + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp ts) {
  const auto day_start = floor<days>(ts);
  const year_month_day ymd{day_start};
  const hh_mm_ss tod{ts - day_start};
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02ld:%02ld:%02ld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()));
  return buf.data();
}

int weekday_of(Timestamp ts) {
  const weekday wd{floor<days>(ts)};
  return static_cast<int>(wd.iso_encoding()) - 1;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

SeriesFrame read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty series file");
  if (trim(line) != "timestamp,value") {
    throw ParseError("series header must be 'timestamp,value', got '" + line + "'");
  }
  SeriesFrame frame;
  Timestamp prev{};
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos) {
      throw ParseError("series row " + std::to_string(row) + ": expected 'timestamp,value'");
    }
    const Timestamp ts = parse_timestamp(view.substr(0, comma));
    const std::string_view num = trim(view.substr(comma + 1));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
      throw ParseError("series row " + std::to_string(row) + ": bad value '" + std::string(num) + "'");
    }
    if (!std::isfinite(value)) {
      throw ValidationError("series row " + std::to_string(row) + ": non-finite value");
    }
    if (frame.values.empty()) {
      frame.start = ts;
    } else if (ts - prev != minutes(kStepMinutes)) {
      throw ValidationError("series row " + std::to_string(row) + ": timestamps must advance by 15 minutes");
    }
    prev = ts;
    frame.values.push_back(value);
  }
  return frame;
}

SeriesFrame read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open series file " + path.string());
  return read_series_csv(in);
}

void write_series_csv(std::ostream& out, const SeriesFrame& series) {
  out << "timestamp,value\n";
  for (std::size_t k = 0; k < series.values.size(); ++k) {
    out << format_timestamp(series.timestamp_at(k)) << ',' << format_double(series.values[k]) << '\n';
  }
}

void write_series_csv(const std::filesystem::path& path, const SeriesFrame& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_series_csv(out, series);
}

}  // namespace campsched
