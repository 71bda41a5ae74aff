// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mlergm::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row, for error messages.
  std::vector<std::size_t> lines;

  /// Column index of `name`, or npos.
  std::size_t column(std::string_view name) const;
};

/// Reads a comma separated table with a header line. Fields are not quoted;
/// surrounding whitespace and a trailing CR are stripped. Blank lines are
/// skipped. Throws DataError on ragged rows.
Table read(std::istream& in, std::string_view source_name = "<input>");
Table read_file(const std::string& path);

/// Shortest round-tripping decimal representation of `value`.
std::string format_double(double value);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace mlergm::csv
