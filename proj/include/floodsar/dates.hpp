#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace floodsar {

// Calendar date, UTC. Conversions go through std::chrono civil arithmetic.
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    static Date from_days(int64_t days_since_epoch);
    int64_t to_days() const;

    // "YYYY-MM-DD"
    static Date parse(std::string_view s);
    std::string to_string() const;

    auto operator<=>(const Date&) const = default;
};

// Instant in UTC, seconds since the Unix epoch.
struct Timestamp {
    int64_t seconds = 0;

    // Accepts "YYYY-MM-DDTHH:MM:SSZ" or a bare "YYYY-MM-DD" (midnight).
    static Timestamp parse(std::string_view s);
    std::string to_string() const;
    Date date() const;

    auto operator<=>(const Timestamp&) const = default;
};

// Calendar month, the index unit of every monthly series.
struct YearMonth {
    int year = 1970;
    int month = 1;

    static YearMonth of(const Date& d) { return {d.year, d.month}; }
    YearMonth next() const;
    // Signed month count from `origin` to this.
    int months_since(const YearMonth& origin) const;
    std::string to_string() const;

    auto operator<=>(const YearMonth&) const = default;
};

}  // namespace floodsar
