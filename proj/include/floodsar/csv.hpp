#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace floodsar {

// Shortest decimal string that round-trips the exact double value.
std::string format_double(double v);
double parse_double(std::string_view s, const char* what = "number");
long long parse_int(std::string_view s, const char* what = "integer");

// Minimal CSV: comma-separated, no quoting. Field values in this project's
// schemas never contain commas or newlines.
std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Reads a whole CSV file. When `expected_header` is non-empty the file header
// must match it exactly.
CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected_header = {});

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Flat key=value files ('#' comments and blank lines ignored). Order preserved
// on write so outputs are deterministic.
std::vector<std::pair<std::string, std::string>> read_kv(const std::string& path);
void write_kv(const std::string& path, const std::vector<std::pair<std::string, std::string>>& entries);
std::map<std::string, std::string> kv_to_map(const std::vector<std::pair<std::string, std::string>>& entries);

std::string read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::string_view bytes);

}  // namespace floodsar
