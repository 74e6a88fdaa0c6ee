#include "streetscope/timeutil.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "streetscope/errors.hpp"

namespace streetscope {

namespace {

int parse_fixed(const std::string& s, size_t pos, size_t n) {
  if (pos + n > s.size()) throw IoError("timestamp truncated: " + s);
  int value = 0;
  for (size_t i = pos; i < pos + n; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw IoError("timestamp has non-digit where digits expected: " + s);
    value = value * 10 + (s[i] - '0');
  }
  return value;
}

void expect(const std::string& s, size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c)
    throw IoError("malformed timestamp: " + s);
}

}  // namespace

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  year = static_cast<int>(y + (month <= 2));
}

std::int64_t parse_rfc3339(const std::string& s) {
  // YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)
  if (s.size() < 20) throw IoError("timestamp too short: " + s);
  const int year = parse_fixed(s, 0, 4);
  expect(s, 4, '-');
  const int month = parse_fixed(s, 5, 2);
  expect(s, 7, '-');
  const int day = parse_fixed(s, 8, 2);
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ')
    throw IoError("malformed timestamp: " + s);
  const int hour = parse_fixed(s, 11, 2);
  expect(s, 13, ':');
  const int minute = parse_fixed(s, 14, 2);
  expect(s, 16, ':');
  const int second = parse_fixed(s, 17, 2);
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
      minute > 59 || second > 60)
    throw IoError("timestamp field out of range: " + s);

  size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      throw IoError("malformed fractional seconds: " + s);
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  if (pos >= s.size()) throw IoError("timestamp missing offset: " + s);

  std::int64_t offset_seconds = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '+' ? 1 : -1;
    const int oh = parse_fixed(s, pos + 1, 2);
    expect(s, pos + 3, ':');
    const int om = parse_fixed(s, pos + 4, 2);
    offset_seconds = sign * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    throw IoError("malformed timestamp offset: " + s);
  }
  if (pos != s.size()) throw IoError("trailing characters in timestamp: " + s);

  return days_from_civil(year, month, day) * 86400 + hour * 3600 +
         minute * 60 + second - offset_seconds;
}

std::string format_rfc3339(std::int64_t t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::int64_t parse_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-')
    throw IoError("malformed date: " + s);
  const int y = parse_fixed(s, 0, 4);
  const int m = parse_fixed(s, 5, 2);
  const int d = parse_fixed(s, 8, 2);
  if (m < 1 || m > 12 || d < 1 || d > 31)
    throw IoError("date field out of range: " + s);
  return days_from_civil(y, m, d);
}

std::string format_date(std::int64_t days) {
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

}  // namespace streetscope
