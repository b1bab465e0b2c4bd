#include "lorawsn/timefmt.hpp"

#include <chrono>
#include <cstdio>

namespace lorawsn {

namespace {

using namespace std::chrono;

struct Civil {
  year_month_day date;
  std::int64_t micros_of_day;
};

Civil split(UnixMicros t) {
  const sys_days day = floor<days>(sys_time<microseconds>{microseconds{t}});
  const std::int64_t rem = t - duration_cast<microseconds>(day.time_since_epoch()).count();
  return Civil{year_month_day{day}, rem};
}

bool digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::string format_iso8601(UnixMicros t) {
  const Civil c = split(t);
  const std::int64_t secs = c.micros_of_day / 1'000'000;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ",
                static_cast<int>(c.date.year()), static_cast<unsigned>(c.date.month()),
                static_cast<unsigned>(c.date.day()), static_cast<long long>(secs / 3600),
                static_cast<long long>(secs / 60 % 60), static_cast<long long>(secs % 60),
                static_cast<long long>(c.micros_of_day % 1'000'000));
  return buf;
}

std::optional<UnixMicros> parse_iso8601(std::string_view s) {
  // 0123456789012345678
  // YYYY-MM-DDTHH:MM:SS
  if (s.size() < 20 || s.back() != 'Z') return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':') return std::nullopt;
  const std::string_view y = s.substr(0, 4), mo = s.substr(5, 2), d = s.substr(8, 2),
                         h = s.substr(11, 2), mi = s.substr(14, 2), se = s.substr(17, 2);
  if (!digits(y) || !digits(mo) || !digits(d) || !digits(h) || !digits(mi) || !digits(se))
    return std::nullopt;

  std::int64_t frac_us = 0;
  const std::string_view rest = s.substr(19, s.size() - 20);
  if (!rest.empty()) {
    if (rest[0] != '.') return std::nullopt;
    const std::string_view frac = rest.substr(1);
    if (frac.size() > 6 || !digits(frac)) return std::nullopt;
    frac_us = to_int(frac);
    for (std::size_t i = frac.size(); i < 6; ++i) frac_us *= 10;
  }

  const year_month_day date{year{to_int(y)}, month{static_cast<unsigned>(to_int(mo))},
                            day{static_cast<unsigned>(to_int(d))}};
  const int hh = to_int(h), mm = to_int(mi), ss = to_int(se);
  if (!date.ok() || hh > 23 || mm > 59 || ss > 59) return std::nullopt;

  const std::int64_t day_us = duration_cast<microseconds>(sys_days{date}.time_since_epoch()).count();
  return day_us + ((hh * 60LL + mm) * 60LL + ss) * 1'000'000LL + frac_us;
}

std::string day_stamp(UnixMicros t) {
  const Civil c = split(t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(c.date.year()),
                static_cast<unsigned>(c.date.month()), static_cast<unsigned>(c.date.day()));
  return buf;
}

}  // namespace lorawsn
