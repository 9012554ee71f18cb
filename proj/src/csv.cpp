#include "fedgraph/csv.hpp"

#include <istream>

#include "fedgraph/error.hpp"

namespace fedgraph::csv {

std::string escape(const std::string& field) {
    bool needs_quote = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quote) return field;
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    out.push_back('\n');
    return out;
}

bool Reader::next(std::vector<std::string>& row) {
    row.clear();
    int c = in_.get();
    if (c == EOF) return false;
    ++line_;
    std::string field;
    bool in_quotes = false;
    for (;;) {
        if (c == EOF) {
            if (in_quotes) raise(errc::schema_violation, "unterminated quoted field at end of file");
            row.push_back(std::move(field));
            return true;
        }
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                int peek = in_.peek();
                if (peek == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty()) {
            in_quotes = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            row.push_back(std::move(field));
            return true;
        } else if (ch == '\r') {
            // tolerate CRLF input; output is always plain LF
        } else {
            field.push_back(ch);
        }
        c = in_.get();
    }
}

} // namespace fedgraph::csv
