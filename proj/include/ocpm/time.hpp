#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ocpm {

/// UTC instant at second precision. The whole library works in UTC; logs never
/// carry timezone information.
struct Timestamp {
    std::int64_t secs = 0; // seconds since the Unix epoch

    auto operator<=>(const Timestamp&) const = default;
};

/// Days elapsed since 1970-01-01 for the UTC calendar date containing `ts`.
/// Used as the "day" key for daily case notions.
std::int64_t utc_day(Timestamp ts);

/// Parses "YYYY-MM-DD HH:MM[:SS]" or ISO-8601
/// "YYYY-MM-DDTHH:MM[:SS[.frac]][Z|+HH:MM|-HH:MM|+HHMM|-HHMM]".
/// Offsets are applied to yield UTC; fractional seconds are truncated.
/// Throws MalformedInput on anything else.
Timestamp parse_timestamp(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ" — the one format the serializer ever emits.
std::string format_iso(Timestamp ts);

/// "YYYY-MM-DD" (UTC calendar date).
std::string format_date(Timestamp ts);

/// Builds a UTC timestamp from civil fields. Throws MalformedInput when a
/// field is out of range.
Timestamp make_utc(int year, int month, int day, int hour, int minute, int second);

inline double hours_between(Timestamp from, Timestamp to) {
    return static_cast<double>(to.secs - from.secs) / 3600.0;
}

} // namespace ocpm
