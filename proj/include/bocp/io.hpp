#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bocp {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws std::out_of_range if missing.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace bocp
