#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace clevo {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Column-named numeric table written as CSV with a header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::string to_csv() const;
  static Table from_csv(std::string_view text);
};

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace clevo
