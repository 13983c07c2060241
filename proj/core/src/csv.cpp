#include "gnefair/csv.hpp"

#include <charconv>
#include <cmath>

#include "gnefair/errors.hpp"

namespace gnefair::csv {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

Table& Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw InvalidArgument("CSV row has " + std::to_string(cells.size()) +
                          " cells, header has " + std::to_string(header_.size()));
  rows_.push_back(std::move(cells));
  return *this;
}

std::string Table::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

}  // namespace gnefair::csv
