#include "floodsar/dates.hpp"

#include <charconv>
#include <chrono>

#include "floodsar/errors.hpp"

namespace floodsar {

namespace {

int parse_int_field(std::string_view s, size_t pos, size_t len, const char* what) {
    if (pos + len > s.size())
        throw FormatError("date/time string too short: '" + std::string(s) + "'");
    int v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    if (ec != std::errc() || p != s.data() + pos + len)
        throw FormatError(std::string("bad ") + what + " in '" + std::string(s) + "'");
    return v;
}

}  // namespace

Date Date::from_days(int64_t days_since_epoch) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{days_since_epoch}}};
    return {int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
}

int64_t Date::to_days() const {
    using namespace std::chrono;
    return sys_days{std::chrono::year{year} / month / day}.time_since_epoch().count();
}

Date Date::parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw FormatError("expected YYYY-MM-DD, got '" + std::string(s) + "'");
    Date d;
    d.year = parse_int_field(s, 0, 4, "year");
    d.month = parse_int_field(s, 5, 2, "month");
    d.day = parse_int_field(s, 8, 2, "day");
    using namespace std::chrono;
    if (!(std::chrono::year{d.year} / d.month / d.day).ok())
        throw FormatError("invalid calendar date '" + std::string(s) + "'");
    return d;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

Timestamp Timestamp::parse(std::string_view s) {
    if (s.size() == 10) return {Date::parse(s).to_days() * 86400};
    if (s.size() != 20 || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z')
        throw FormatError("expected YYYY-MM-DDTHH:MM:SSZ, got '" + std::string(s) + "'");
    Date d = Date::parse(s.substr(0, 10));
    int hh = parse_int_field(s, 11, 2, "hour");
    int mm = parse_int_field(s, 14, 2, "minute");
    int ss = parse_int_field(s, 17, 2, "second");
    if (hh > 23 || mm > 59 || ss > 59)
        throw FormatError("invalid time of day in '" + std::string(s) + "'");
    return {d.to_days() * 86400 + hh * 3600 + mm * 60 + ss};
}

std::string Timestamp::to_string() const {
    int64_t days = seconds >= 0 ? seconds / 86400 : (seconds - 86399) / 86400;
    int64_t rem = seconds - days * 86400;
    Date d = Date::from_days(days);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                  int(rem / 3600), int(rem / 60 % 60), int(rem % 60));
    return buf;
}

Date Timestamp::date() const {
    int64_t days = seconds >= 0 ? seconds / 86400 : (seconds - 86399) / 86400;
    return Date::from_days(days);
}

YearMonth YearMonth::next() const {
    return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
}

int YearMonth::months_since(const YearMonth& origin) const {
    return (year - origin.year) * 12 + (month - origin.month);
}

std::string YearMonth::to_string() const {
    char buf[12];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

}  // namespace floodsar
