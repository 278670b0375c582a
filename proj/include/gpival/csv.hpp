#pragma once

#include <string>
#include <vector>

namespace gpival {

// Minimal CSV table: comma separated, '.' decimal, mandatory header row.
// Fields may be quoted with '"'; embedded quotes are doubled.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  std::string to_string() const;
  static CsvTable parse(const std::string& text);
};

std::string format_double(double v);

}  // namespace gpival
