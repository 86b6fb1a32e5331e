#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace groove::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
  // 1-based line number in the source file for each row in `rows`.
  std::vector<std::size_t> line_numbers;
};

// Splits one CSV record. Handles double-quoted fields with "" escapes.
Row split_line(std::string_view line);

// Reads a UTF-8 CSV file with a header row. Blank lines and lines starting
// with '#' are skipped.
Table read_file(const std::filesystem::path& path);

// Quotes a field when it contains a separator, quote or newline.
std::string escape(std::string_view field);

std::string join(const Row& fields);

// Parses a real number written with '.' as decimal point. Throws
// InputError carrying `context` on failure.
double parse_double(std::string_view text, std::string_view context);

// Shortest round-trippable text of `value` after rounding to 9 significant
// digits. Used for every real number this toolkit writes.
std::string format_real(double value);

// Rounds to 9 significant digits (the value format_real prints).
double round_sig9(double value);

}  // namespace groove::csv
