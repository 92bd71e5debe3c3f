// Copyright 2026 The otaada Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OTAADA_CSV_H_
#define OTAADA_CSV_H_

// Minimal RFC 4180 style CSV output with '#' header comment lines.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "otaada/errors.h"

namespace otaada {

inline std::string FormatNumber(double value, int precision = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
  return buf;
}

using CsvCell = std::variant<double, std::int64_t, std::string>;

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;

  // Index of a named column, or -1.
  int ColumnIndex(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline std::string EscapeCsvField(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string FormatCell(const CsvCell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    if (!std::isfinite(*d))
      throw InvalidArgumentError("CSV cell is not finite");
    return FormatNumber(*d);
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell))
    return std::to_string(*i);
  return EscapeCsvField(std::get<std::string>(cell));
}

// Writes each comment line prefixed with "# ", then the header and rows.
inline void WriteCsv(std::ostream& os, const CsvTable& table,
                     const std::vector<std::string>& comments = {}) {
  for (const auto& line : comments) os << "# " << line << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << EscapeCsvField(table.columns[i]);
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw InvalidArgumentError("CSV row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << FormatCell(row[i]);
    os << '\n';
  }
}

}  // namespace otaada

#endif  // OTAADA_CSV_H_
