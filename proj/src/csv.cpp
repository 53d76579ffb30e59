#include "exactsel/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "exactsel/errors.hpp"

namespace exactsel {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

void check_cell(const std::string& c) {
  if (c.find_first_of(",\"\r\n") != std::string::npos)
    throw DomainError("CSV cell may not contain commas, quotes or line breaks: " + c);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_line(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << '\n';
}

}  // namespace

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw DomainError("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                      std::to_string(header_.size()));
  for (const auto& c : row) check_cell(c);
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
  write_line(os, header_);
  for (const auto& r : rows_) write_line(os, r);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

CsvTable CsvTable::parse(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("CSV input is empty");
  CsvTable t(split(line));
  while (std::getline(is, line)) t.add_row(split(line));
  return t;
}

CsvTable CsvTable::parse(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw DomainError("CSV has no column " + name);
  return static_cast<std::size_t>(it - header_.begin());
}

}  // namespace exactsel
