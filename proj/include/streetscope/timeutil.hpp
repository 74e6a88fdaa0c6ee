#pragma once

#include <cstdint>
#include <string>

namespace streetscope {

// Civil-calendar conversions (proleptic Gregorian, UTC only).
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

// RFC 3339 timestamp <-> Unix seconds (UTC). Fractional seconds are accepted
// and truncated; offsets other than Z/+00:00 are applied. Throws IoError on
// malformed input.
std::int64_t parse_rfc3339(const std::string& text);
std::string format_rfc3339(std::int64_t unix_seconds);

// "YYYY-MM-DD" <-> days since 1970-01-01.
std::int64_t parse_date(const std::string& text);
std::string format_date(std::int64_t days_since_epoch);

}  // namespace streetscope
