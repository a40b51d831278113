#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace safetydash {

using Date = std::chrono::sys_days;

struct DateTime {
  Date date;
  std::optional<std::chrono::seconds> time_of_day;

  friend bool operator==(const DateTime&, const DateTime&) = default;
};

// Inclusive on both ends; either bound may be open.
struct DateRange {
  std::optional<Date> from;
  std::optional<Date> to;

  bool contains(Date d) const
  {
    return (!from || d >= *from) && (!to || d <= *to);
  }
};

Date make_date(int y, unsigned m, unsigned d);

/// Accepts ISO-8601 ("2014-06-01", "2014-06-01T13:05[:09]", "2014-06-01 13:05:09")
/// and US municipal exports ("06/01/2014", "6/1/2014 1:05 PM", "06/01/2014 13:05:09").
/// Returns nullopt for anything else, including impossible calendar dates.
std::optional<DateTime> parse_date_time(std::string_view text);
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date d);                 // YYYY-MM-DD
std::string format_time(std::chrono::seconds t); // HH:MM:SS

int year_of(Date d);
unsigned month_of(Date d);

}  // namespace safetydash
