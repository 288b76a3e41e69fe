#include "prevbound/dates.hpp"

#include <cstdio>

namespace prevbound {

namespace {

bool all_digits(std::string_view s) {
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return !s.empty();
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

}  // namespace

std::optional<Day> parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    std::string_view ys = s.substr(0, 4), ms = s.substr(5, 2), ds = s.substr(8, 2);
    if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;
    int y = to_int(ys);
    unsigned m = static_cast<unsigned>(to_int(ms));
    unsigned d = static_cast<unsigned>(to_int(ds));
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    Day z = days_from_civil(y, m, d);
    Civil back = civil_from_days(z);
    if (back.year != y || back.month != m || back.day != d) return std::nullopt;  // e.g. Feb 30
    return z;
}

std::optional<Seconds> parse_datetime(std::string_view s) {
    if (s.size() != 19) return std::nullopt;
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    auto date = parse_date(s.substr(0, 10));
    if (!date) return std::nullopt;
    std::string_view hs = s.substr(11, 2), mins = s.substr(14, 2), secs = s.substr(17, 2);
    if (s[13] != ':' || s[16] != ':') return std::nullopt;
    if (!all_digits(hs) || !all_digits(mins) || !all_digits(secs)) return std::nullopt;
    int h = to_int(hs), mi = to_int(mins), se = to_int(secs);
    if (h > 23 || mi > 59 || se > 60) return std::nullopt;
    return static_cast<Seconds>(*date) * kSecondsPerDay + h * 3600 + mi * 60 + se;
}

std::string format_date(Day d) {
    Civil c = civil_from_days(d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
    return buf;
}

std::string format_datetime(Seconds t) {
    Day d = day_of(t);
    Seconds rem = t - static_cast<Seconds>(d) * kSecondsPerDay;
    Civil c = civil_from_days(d);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", c.year, c.month, c.day,
                  static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

}  // namespace prevbound
