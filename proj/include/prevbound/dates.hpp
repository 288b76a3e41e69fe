#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace prevbound {

// Calendar dates are days since 1970-01-01; timestamps are seconds since the
// same epoch. Inputs are ISO-8601 with no time zones (the data sources are a
// single jurisdiction).

using Day = std::int32_t;
using Seconds = std::int64_t;

constexpr Seconds kSecondsPerDay = 86400;

// Howard Hinnant's civil-date algorithms.
constexpr Day days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

struct Civil {
    int year;
    unsigned month;
    unsigned day;
};

constexpr Civil civil_from_days(Day z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
}

// 0 = Monday ... 6 = Sunday (ISO weekday, zero-based).
constexpr int weekday(Day z) {
    return static_cast<int>(z >= -4 ? (z + 3) % 7 : (z + 4) % 7 + 6);
}

constexpr int kFriday = 4;

// Parses YYYY-MM-DD. Returns nullopt on malformed input.
std::optional<Day> parse_date(std::string_view s);

// Parses YYYY-MM-DD(T| )HH:MM:SS. Returns nullopt on malformed input.
std::optional<Seconds> parse_datetime(std::string_view s);

std::string format_date(Day d);
std::string format_datetime(Seconds t);

inline Day day_of(Seconds t) {
    // Floor division; timestamps before the epoch do not occur in practice
    // but keep this correct anyway.
    return static_cast<Day>(t >= 0 ? t / kSecondsPerDay : (t - kSecondsPerDay + 1) / kSecondsPerDay);
}

}  // namespace prevbound
