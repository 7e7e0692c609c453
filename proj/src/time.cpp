#include "ocpm/time.hpp"

#include "ocpm/errors.hpp"

#include <array>
#include <cstdio>

namespace ocpm {

namespace {

// Civil <-> day-count conversions (proleptic Gregorian, days since 1970-01-01).
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const int yoe = static_cast<int>(y - era * 400);                    // [0, 399]
    const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;     // [0, 365]
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;              // [0, 146096]
    return era * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const int doe = static_cast<int>(z - era * 146097);                 // [0, 146096]
    const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = yoe + era * 400;
    const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);            // [0, 365]
    const int mp = (5 * doy + 2) / 153;                                 // [0, 11]
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yy + (m <= 2);
}

bool is_leap(std::int64_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(std::int64_t y, int m) {
    static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[static_cast<std::size_t>(m - 1)];
}

[[noreturn]] void bad_timestamp(std::string_view text) {
    throw MalformedInput("bad timestamp: \"" + std::string(text) + "\"");
}

// Parses exactly `width` digits starting at s[pos]; advances pos.
int take_digits(std::string_view s, std::size_t& pos, int width, std::string_view whole) {
    if (pos + static_cast<std::size_t>(width) > s.size()) bad_timestamp(whole);
    int value = 0;
    for (int i = 0; i < width; ++i) {
        const char c = s[pos++];
        if (c < '0' || c > '9') bad_timestamp(whole);
        value = value * 10 + (c - '0');
    }
    return value;
}

void expect(std::string_view s, std::size_t& pos, char c, std::string_view whole) {
    if (pos >= s.size() || s[pos] != c) bad_timestamp(whole);
    ++pos;
}

} // namespace

std::int64_t utc_day(Timestamp ts) {
    // Floor division so pre-1970 instants land on the correct date.
    std::int64_t day = ts.secs / 86400;
    if (ts.secs % 86400 < 0) --day;
    return day;
}

Timestamp make_utc(int year, int month, int day, int hour, int minute, int second) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) ||
        hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 || second > 59) {
        throw MalformedInput("timestamp field out of range");
    }
    const std::int64_t days = days_from_civil(year, month, day);
    return Timestamp{days * 86400 + hour * 3600 + minute * 60 + second};
}

Timestamp parse_timestamp(std::string_view text) {
    std::size_t pos = 0;
    const int year = take_digits(text, pos, 4, text);
    expect(text, pos, '-', text);
    const int month = take_digits(text, pos, 2, text);
    expect(text, pos, '-', text);
    const int day = take_digits(text, pos, 2, text);
    if (pos >= text.size() || (text[pos] != ' ' && text[pos] != 'T')) bad_timestamp(text);
    ++pos;
    const int hour = take_digits(text, pos, 2, text);
    expect(text, pos, ':', text);
    const int minute = take_digits(text, pos, 2, text);
    int second = 0;
    if (pos < text.size() && text[pos] == ':') {
        ++pos;
        second = take_digits(text, pos, 2, text);
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            if (pos >= text.size() || text[pos] < '0' || text[pos] > '9') bad_timestamp(text);
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        }
    }

    std::int64_t offsetSecs = 0;
    if (pos < text.size()) {
        const char c = text[pos];
        if (c == 'Z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            ++pos;
            const int oh = take_digits(text, pos, 2, text);
            if (pos < text.size() && text[pos] == ':') ++pos;
            const int om = pos < text.size() ? take_digits(text, pos, 2, text) : 0;
            if (oh > 23 || om > 59) bad_timestamp(text);
            offsetSecs = (c == '+' ? 1 : -1) * (oh * 3600 + om * 60);
        } else {
            bad_timestamp(text);
        }
    }
    if (pos != text.size()) bad_timestamp(text);

    Timestamp ts;
    try {
        ts = make_utc(year, month, day, hour, minute, second);
    } catch (const MalformedInput&) {
        bad_timestamp(text);
    }
    ts.secs -= offsetSecs;
    return ts;
}

std::string format_iso(Timestamp ts) {
    const std::int64_t day = utc_day(ts);
    std::int64_t rem = ts.secs - day * 86400;
    std::int64_t y = 0;
    int m = 0, d = 0;
    civil_from_days(day, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02d:%02d:%02dZ",
                  static_cast<long long>(y), m, d, static_cast<int>(rem / 3600),
                  static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
    return buf;
}

std::string format_date(Timestamp ts) {
    std::int64_t y = 0;
    int m = 0, d = 0;
    civil_from_days(utc_day(ts), y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02d", static_cast<long long>(y), m, d);
    return buf;
}

} // namespace ocpm
