#pragma once

// Comma-separated output with a fixed, locale-independent number format.

#include <string>
#include <vector>

namespace gnefair::csv {

/// 12 significant digits, shortest of fixed/scientific; "nan", "inf", "-inf".
std::string format_number(double v);

class Table {
 public:
  explicit Table(std::vector<std::string> header);

  Table& add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  /// Header line plus one line per row, each terminated by '\n'.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace gnefair::csv
