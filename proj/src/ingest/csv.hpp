/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aemos::ingest::detail {

/// Minimal reader for the comma-separated formats used here: mandatory
/// header, no quoting, '#' comment lines and blank lines skipped.
class CsvReader {
 public:
  CsvReader(const std::filesystem::path& path, const std::vector<std::string>& header);

  /// Next data row; false at end of file.  Throws ParseError on a wrong field count.
  bool next(std::vector<std::string_view>& fields);

  std::size_t line() const { return line_no_; }
  const std::string& file() const { return file_; }

  [[noreturn]] void fail(const std::string& what) const;

  double number(std::string_view field, const char* name) const;
  /// Empty, "NA" or "nan" become nullopt.
  std::optional<double> maybe_number(std::string_view field, const char* name) const;

 private:
  std::string file_;
  std::ifstream in_;
  std::string buffer_;
  std::size_t line_no_ = 0;
  std::size_t columns_ = 0;
};

std::string_view trim(std::string_view s);

}  // namespace aemos::ingest::detail
