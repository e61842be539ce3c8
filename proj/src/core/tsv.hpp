#pragma once

#include <string>
#include <vector>

namespace scp {

// Tab-separated text helpers shared by the file formats (schema, corpus,
// judgments, correlation/weight tables, history export).

std::vector<std::string> split_tsv_line(const std::string& line);

// Reads all lines, dropping a trailing empty line. '#'-prefixed lines are
// returned separately so formats can carry directives (e.g. "# epsilon=0.05").
struct TsvFile {
    std::vector<std::string> comments;
    std::vector<std::vector<std::string>> rows;
    std::vector<size_t> line_numbers;  // 1-based, parallel to rows
};

TsvFile read_tsv(const std::string& path);

// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace scp
