#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prevbound/errors.hpp"

namespace prevbound {

// Minimal delimited-text helpers. The input schemas have no quoting or
// embedded delimiters, so rows split on ',' directly; this keeps the hot
// ingest path allocation-free.

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Splits `line` on `sep` into at most `max_fields` views stored in `out`.
// Returns the number of fields found (fields beyond max_fields are an error
// the caller detects by comparing with the expected count + 1 sentinel).
inline std::size_t split_fields(std::string_view line, char sep, std::string_view* out,
                                std::size_t max_fields) {
    std::size_t n = 0;
    std::size_t start = 0;
    while (n < max_fields) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out[n++] = line.substr(start);
            return n;
        }
        out[n++] = line.substr(start, pos - start);
        start = pos + 1;
    }
    return n;
}

// Calls fn(line_number, line) for every line in buf; line numbers are
// 1-based, the trailing newline is stripped, CRLF tolerated, and a final
// line without newline is still delivered.
template <typename Fn>
void for_each_line(std::string_view buf, Fn&& fn) {
    std::uint64_t line_no = 0;
    std::size_t start = 0;
    while (start < buf.size()) {
        std::size_t nl = buf.find('\n', start);
        std::size_t end = (nl == std::string_view::npos) ? buf.size() : nl;
        std::string_view line = buf.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(++line_no, line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
}

struct RowIssue {
    std::uint64_t line = 0;
    std::string message;
};

}  // namespace prevbound
