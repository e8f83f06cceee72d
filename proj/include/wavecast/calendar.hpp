#pragma once

#include "wavecast/types.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace wavecast {

struct CivilDate {
    int year = 1970;
    int month = 1; ///< 1..12
    int day = 1;   ///< 1..31
};

DayNumber days_from_civil(const CivilDate& d);
CivilDate civil_from_days(DayNumber n);

/// "YYYY-MM-DD" (or "YYYY/MM/DD"); empty on malformed or impossible dates.
std::optional<DayNumber> parse_date(std::string_view s);
std::string format_date(DayNumber n);

/// Timestamp split into calendar day and minute of day.
struct Timestamp {
    DayNumber day = 0;
    int minute = 0; ///< 0..1439
};

/// ISO-8601 style "YYYY-MM-DDTHH:MM[:SS]" or "YYYY-MM-DD HH:MM[:SS]" (also
/// accepts '/' as date separator). Seconds must be zero.
std::optional<Timestamp> parse_timestamp(std::string_view s);
std::string format_timestamp(const Timestamp& t);

/// Day of year, 0-based.
int day_of_year(DayNumber n);

} // namespace wavecast
