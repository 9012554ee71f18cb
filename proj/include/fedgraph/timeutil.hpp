#pragma once

#include <cstdint>
#include <string>

namespace fedgraph {

// Calendar dates are carried as days since 1970-01-01; instants as UTC
// seconds since the epoch. libstdc++ 11 lacks chrono calendar formatting,
// so the civil-date conversions are done by hand.

using Date = int32_t;      // days since epoch
using Timestamp = int64_t; // seconds since epoch, UTC

Date date_from_ymd(int year, int month, int day);
void ymd_from_date(Date d, int& year, int& month, int& day);

/// "YYYY-MM-DD". Throws Error(SchemaViolation) on malformed input.
Date parse_date(const std::string& s);
std::string format_date(Date d);

/// "YYYY-MM-DDTHH:MM:SSZ", second resolution.
Timestamp parse_timestamp(const std::string& s);
std::string format_timestamp(Timestamp t);

inline Timestamp timestamp_at_midnight(Date d) { return Timestamp(d) * 86400; }
inline Date date_of_timestamp(Timestamp t) {
    return Date(t >= 0 ? t / 86400 : (t - 86399) / 86400);
}

/// Current wall-clock time formatted as above (report metadata only).
std::string now_utc_string();

} // namespace fedgraph
