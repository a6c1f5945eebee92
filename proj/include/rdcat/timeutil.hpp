#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace rdcat {

// All timestamps are UTC. Catalog-level times have second resolution; time
// series samples keep microseconds so sub-second cadences align exactly.
using Timestamp = std::chrono::sys_seconds;
using Instant = std::chrono::sys_time<std::chrono::microseconds>;

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.ffffff]]" (space also allowed
// as separator) with an optional "Z", "UTC" or "+hh:mm"/"-hh:mm" suffix.
// Throws Error(ParseError).
Instant parse_instant(std::string_view text);
Timestamp parse_timestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);
// Same, with a fractional part (trailing zeros trimmed) when not on a whole second.
std::string format_instant(Instant t);
// "YYYY-MM-DD"
std::string format_date(Timestamp t);

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                         int second = 0);

}  // namespace rdcat
