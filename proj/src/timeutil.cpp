#include "fedgraph/timeutil.hpp"

#include <cstdio>
#include <ctime>

#include "fedgraph/error.hpp"

namespace fedgraph {

// Civil-date conversions after Howard Hinnant's algorithms.
Date date_from_ymd(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

void ymd_from_date(Date z0, int& y, int& m, int& d) {
    int z = z0 + 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yr = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = yr + (m <= 2);
}

namespace {

bool scan_uint(const std::string& s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

bool valid_ymd(int y, int m, int d) {
    if (m < 1 || m > 12 || d < 1) return false;
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dm = days[m - 1];
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) dm = 29;
    return d <= dm;
}

} // namespace

Date parse_date(const std::string& s) {
    int y, m, d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
        !scan_uint(s, 0, 4, y) || !scan_uint(s, 5, 2, m) || !scan_uint(s, 8, 2, d) ||
        !valid_ymd(y, m, d)) {
        raise(errc::schema_violation, "malformed date '" + s + "' (expected YYYY-MM-DD)");
    }
    return date_from_ymd(y, m, d);
}

std::string format_date(Date d) {
    int y, m, dd;
    ymd_from_date(d, y, m, dd);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, dd);
    return buf;
}

Timestamp parse_timestamp(const std::string& s) {
    int hh, mm, ss;
    if (s.size() != 20 || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z' ||
        !scan_uint(s, 11, 2, hh) || !scan_uint(s, 14, 2, mm) || !scan_uint(s, 17, 2, ss) ||
        hh > 23 || mm > 59 || ss > 59) {
        raise(errc::schema_violation,
              "malformed timestamp '" + s + "' (expected YYYY-MM-DDTHH:MM:SSZ)");
    }
    Date d = parse_date(s.substr(0, 10));
    return timestamp_at_midnight(d) + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(Timestamp t) {
    Date d = date_of_timestamp(t);
    int64_t rem = t - timestamp_at_midnight(d);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(d).c_str(),
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::string now_utc_string() {
    return format_timestamp(static_cast<Timestamp>(std::time(nullptr)));
}

} // namespace fedgraph
