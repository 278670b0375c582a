#include "gpival/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gpival {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

bool needs_quoting(const std::string& f) {
  return f.find_first_of(",\"\n\r") != std::string::npos;
}

void append_field(std::string& out, const std::string& f) {
  if (!needs_quoting(f)) {
    out += f;
    return;
  }
  out += '"';
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::vector<std::string> parse_line(const std::string& text, std::size_t& pos) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  while (pos < text.size()) {
    char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          cur += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      fields.push_back(cur);
      return fields;
    } else {
      cur += c;
    }
    ++pos;
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    append_field(out, header[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      append_field(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable CsvTable::parse(const std::string& text) {
  CsvTable t;
  std::size_t pos = 0;
  if (text.empty()) throw std::invalid_argument("csv: empty input");
  t.header = parse_line(text, pos);
  while (pos < text.size()) {
    auto row = parse_line(text, pos);
    if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
    if (row.size() != t.header.size())
      throw std::invalid_argument("csv: row width does not match header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace gpival
