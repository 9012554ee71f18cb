#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fedgraph::csv {

/// RFC-4180 style quoting: fields containing comma, quote, CR or LF are
/// wrapped in double quotes with embedded quotes doubled.
std::string escape(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

/// Streaming reader; handles quoted fields, including embedded newlines.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads one record. Returns false at end of input.
    bool next(std::vector<std::string>& row);

    size_t line() const { return line_; }

private:
    std::istream& in_;
    size_t line_ = 0;
};

} // namespace fedgraph::csv
