#pragma once

#include <istream>
#include <string>
#include <vector>

namespace humor {

// RFC 4180 reader: quoted fields may hold commas, doubled quotes and newlines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record; false at end of input. Throws DataError on
  // malformed quoting.
  bool next(std::vector<std::string>& fields);

  // Physical line on which the last record started.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

std::string csv_escape(const std::string& field);

}  // namespace humor
