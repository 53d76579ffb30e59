#pragma once

// Comma-separated tables with a one-line header. Cells are kept as text, so
// parse followed by write reproduces the input bytes.

#include <iosfwd>
#include <string>
#include <vector>

namespace exactsel {

/// Decimal with 12 significant digits ("%.12g").
std::string format_number(double v);

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  /// Throws DomainError when the width differs from the header or a cell
  /// contains a comma, quote or newline.
  void add_row(std::vector<std::string> row);

  void write(std::ostream& os) const;
  std::string str() const;
  static CsvTable parse(std::istream& is);
  static CsvTable parse(const std::string& text);

  std::size_t column(const std::string& name) const;  // throws DomainError when missing

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace exactsel
