#include "wavecast/calendar.hpp"

#include <charconv>
#include <cstdio>

namespace wavecast {

// Civil-calendar conversions after H. Hinnant's days_from_civil algorithm.
DayNumber days_from_civil(const CivilDate& d) {
    const int y = d.year - (d.month <= 2 ? 1 : 0);
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned mp = static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9));
    const unsigned doy = (153 * mp + 2) / 5 + static_cast<unsigned>(d.day) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

CivilDate civil_from_days(DayNumber n) {
    const int z = n + 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const int day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    const int month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    return {month <= 2 ? y + 1 : y, month, day};
}

namespace {

bool read_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

std::optional<DayNumber> parse_date(std::string_view s) {
    if (s.size() != 10 || (s[4] != '-' && s[4] != '/') || s[7] != s[4]) return std::nullopt;
    CivilDate d;
    if (!read_int(s.substr(0, 4), d.year) || !read_int(s.substr(5, 2), d.month) ||
        !read_int(s.substr(8, 2), d.day)) {
        return std::nullopt;
    }
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) return std::nullopt;
    const DayNumber n = days_from_civil(d);
    const CivilDate back = civil_from_days(n);
    if (back.year != d.year || back.month != d.month || back.day != d.day) return std::nullopt;
    return n;
}

std::string format_date(DayNumber n) {
    const CivilDate d = civil_from_days(n);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    if (s.size() < 16) return std::nullopt;
    const auto day = parse_date(s.substr(0, 10));
    if (!day || (s[10] != 'T' && s[10] != ' ') || s[13] != ':') return std::nullopt;
    int hh = 0;
    int mm = 0;
    if (!read_int(s.substr(11, 2), hh) || !read_int(s.substr(14, 2), mm)) return std::nullopt;
    std::string_view rest = s.substr(16);
    if (!rest.empty()) {
        int ss = 0;
        if (rest.size() != 3 || rest[0] != ':' || !read_int(rest.substr(1, 2), ss) || ss != 0) {
            return std::nullopt;
        }
    }
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59) return std::nullopt;
    return Timestamp{*day, hh * 60 + mm};
}

std::string format_timestamp(const Timestamp& t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d", t.minute / 60, t.minute % 60);
    return format_date(t.day) + "T" + buf;
}

int day_of_year(DayNumber n) {
    const CivilDate d = civil_from_days(n);
    return n - days_from_civil({d.year, 1, 1});
}

} // namespace wavecast
