#pragma once

#include <string>
#include <vector>

namespace moskit::csv {

struct Row {
    std::vector<std::string> fields;
    size_t line = 0; // 1-based line of the record start, for error messages
};

// Parse RFC4180-ish CSV text: quoted fields, embedded commas/quotes/newlines,
// CRLF tolerant. Empty trailing line ignored.
std::vector<Row> parse(const std::string& text);

std::vector<Row> read_file(const std::string& path);

// Quote a field only when needed.
std::string escape(const std::string& field);

std::string join(const std::vector<std::string>& fields);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace moskit::csv
