#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace hotelml {

/// Calendar timestamp with optional time-of-day part.
/// Canonical text form is "YYYY-MM-DD" or "YYYY-MM-DD HH:MM:SS".
struct Timestamp {
    int year = 0;
    int month = 0;
    int day = 0;
    int hour = 0;
    int minute = 0;
    int second = 0;
    bool has_time = false;

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

inline bool is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int year, int month) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) return 0;
    if (month == 2 && is_leap_year(year)) return 29;
    return kDays[month - 1];
}

namespace detail {

inline bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
    if (pos + count > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

inline bool valid_date(int y, int m, int d) {
    return m >= 1 && m <= 12 && d >= 1 && d <= days_in_month(y, m);
}

}  // namespace detail

/// Parses "YYYY-MM-DD[ HH:MM:SS]" (the native form) or "MM-DD-YYYY" as a
/// fallback for month-first date strings. Returns nullopt when the text is
/// not a valid calendar timestamp.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);

    Timestamp t;
    // YYYY-MM-DD
    if (s.size() >= 10 && s[4] == '-' && s[7] == '-' &&
        detail::read_digits(s, 0, 4, t.year) &&
        detail::read_digits(s, 5, 2, t.month) &&
        detail::read_digits(s, 8, 2, t.day)) {
        if (!detail::valid_date(t.year, t.month, t.day)) return std::nullopt;
        if (s.size() == 10) return t;
        // optional " HH:MM:SS"
        if (s.size() == 19 && s[10] == ' ' && s[13] == ':' && s[16] == ':' &&
            detail::read_digits(s, 11, 2, t.hour) &&
            detail::read_digits(s, 14, 2, t.minute) &&
            detail::read_digits(s, 17, 2, t.second)) {
            if (t.hour > 23 || t.minute > 59 || t.second > 59) return std::nullopt;
            t.has_time = true;
            return t;
        }
        return std::nullopt;
    }
    // MM-DD-YYYY
    if (s.size() == 10 && s[2] == '-' && s[5] == '-' &&
        detail::read_digits(s, 0, 2, t.month) &&
        detail::read_digits(s, 3, 2, t.day) &&
        detail::read_digits(s, 6, 4, t.year)) {
        if (!detail::valid_date(t.year, t.month, t.day)) return std::nullopt;
        return t;
    }
    return std::nullopt;
}

inline std::string format_timestamp(const Timestamp& t) {
    char buf[24];
    if (t.has_time) {
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d",
                      t.year, t.month, t.day, t.hour, t.minute, t.second);
    } else {
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", t.year, t.month, t.day);
    }
    return buf;
}

/// Days since 1970-01-01 for date arithmetic (proleptic Gregorian).
inline long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

inline Timestamp civil_from_days(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    Timestamp t;
    t.year = static_cast<int>(y + (m <= 2));
    t.month = static_cast<int>(m);
    t.day = static_cast<int>(d);
    return t;
}

inline Timestamp add_days(const Timestamp& t, long days) {
    Timestamp r = civil_from_days(days_from_civil(t.year, t.month, t.day) + days);
    r.hour = t.hour;
    r.minute = t.minute;
    r.second = t.second;
    r.has_time = t.has_time;
    return r;
}

}  // namespace hotelml
