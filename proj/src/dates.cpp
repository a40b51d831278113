#include "safetydash/dates.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace safetydash {

namespace {

// Cursor over the input with just enough primitives for the two grammars.
struct Scanner {
  std::string_view s;
  std::size_t pos = 0;

  bool done() const { return pos >= s.size(); }

  bool eat(char c)
  {
    if (!done() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void skip_spaces()
  {
    while (!done() && s[pos] == ' ') ++pos;
  }

  std::optional<int> digits(std::size_t min_len, std::size_t max_len)
  {
    std::size_t start = pos;
    while (!done() && pos - start < max_len && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos - start < min_len) return std::nullopt;
    int v = 0;
    std::from_chars(s.data() + start, s.data() + pos, v);
    return v;
  }
};

std::optional<Date> checked_date(int y, int m, int d)
{
  if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

// hh:mm[:ss] with optional AM/PM suffix when allow_meridiem.
std::optional<std::chrono::seconds> scan_time(Scanner& sc, bool allow_meridiem)
{
  auto hh = sc.digits(1, 2);
  if (!hh || !sc.eat(':')) return std::nullopt;
  auto mm = sc.digits(2, 2);
  if (!mm) return std::nullopt;
  int ss = 0;
  if (sc.eat(':')) {
    auto v = sc.digits(2, 2);
    if (!v) return std::nullopt;
    ss = *v;
  }
  int hour = *hh;
  if (allow_meridiem) {
    sc.skip_spaces();
    if (!sc.done()) {
      auto rest = sc.s.substr(sc.pos);
      auto upper = [](char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); };
      if (rest.size() == 2 && upper(rest[1]) == 'M' && (upper(rest[0]) == 'A' || upper(rest[0]) == 'P')) {
        if (hour < 1 || hour > 12) return std::nullopt;
        bool pm = upper(rest[0]) == 'P';
        hour = hour % 12 + (pm ? 12 : 0);
        sc.pos = sc.s.size();
      }
    }
  }
  if (hour > 23 || *mm > 59 || ss > 59) return std::nullopt;
  return std::chrono::seconds{hour * 3600 + *mm * 60 + ss};
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Date make_date(int y, unsigned m, unsigned d)
{
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

std::optional<DateTime> parse_date_time(std::string_view text)
{
  Scanner sc{trim(text)};
  if (sc.s.empty()) return std::nullopt;

  std::optional<Date> date;
  bool us = false;
  if (sc.s.size() >= 5 && sc.s[4] == '-') {
    auto y = sc.digits(4, 4);
    if (!y || !sc.eat('-')) return std::nullopt;
    auto m = sc.digits(2, 2);
    if (!m || !sc.eat('-')) return std::nullopt;
    auto d = sc.digits(2, 2);
    if (!d) return std::nullopt;
    date = checked_date(*y, *m, *d);
  } else {
    us = true;
    auto m = sc.digits(1, 2);
    if (!m || !sc.eat('/')) return std::nullopt;
    auto d = sc.digits(1, 2);
    if (!d || !sc.eat('/')) return std::nullopt;
    auto y = sc.digits(4, 4);
    if (!y) return std::nullopt;
    date = checked_date(*y, *m, *d);
  }
  if (!date) return std::nullopt;

  DateTime out{*date, std::nullopt};
  if (sc.done()) return out;

  if (!us && sc.eat('T')) {
    // ISO 'T' separator
  } else if (sc.eat(' ')) {
    sc.skip_spaces();
  } else {
    return std::nullopt;
  }
  auto t = scan_time(sc, us);
  if (!t) return std::nullopt;
  if (!us) sc.eat('Z');
  if (!sc.done()) return std::nullopt;
  out.time_of_day = *t;
  return out;
}

std::optional<Date> parse_date(std::string_view text)
{
  auto dt = parse_date_time(text);
  if (!dt) return std::nullopt;
  return dt->date;
}

std::string format_date(Date d)
{
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_time(std::chrono::seconds t)
{
  auto s = t.count();
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", static_cast<long long>(s / 3600),
                static_cast<long long>(s / 60 % 60), static_cast<long long>(s % 60));
  return buf;
}

int year_of(Date d) { return static_cast<int>(std::chrono::year_month_day{d}.year()); }

unsigned month_of(Date d) { return static_cast<unsigned>(std::chrono::year_month_day{d}.month()); }

}  // namespace safetydash
