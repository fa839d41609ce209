/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "csv.hpp"

#include <charconv>
#include <cmath>

#include "aemos/error.hpp"

namespace aemos::ingest::detail {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

namespace {

void split(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool skippable(std::string_view line) {
  const std::string_view t = trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

CsvReader::CsvReader(const std::filesystem::path& path, const std::vector<std::string>& header)
    : file_(path.string()), in_(path), columns_(header.size()) {
  if (!in_) throw InputError("cannot open " + file_);
  std::vector<std::string_view> fields;
  while (std::getline(in_, buffer_)) {
    ++line_no_;
    if (line_no_ == 1 && buffer_.rfind("\xEF\xBB\xBF", 0) == 0) buffer_.erase(0, 3);
    if (skippable(buffer_)) continue;
    split(buffer_, fields);
    bool ok = fields.size() == header.size();
    for (std::size_t i = 0; ok && i < header.size(); ++i) ok = fields[i] == header[i];
    if (!ok) {
      std::string expected;
      for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
      fail("expected header '" + expected + "'");
    }
    return;
  }
  fail("missing header");
}

bool CsvReader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, buffer_)) {
    ++line_no_;
    if (skippable(buffer_)) continue;
    split(buffer_, fields);
    if (fields.size() != columns_) {
      fail("expected " + std::to_string(columns_) + " fields, found " +
           std::to_string(fields.size()));
    }
    return true;
  }
  return false;
}

void CsvReader::fail(const std::string& what) const { throw ParseError(file_, line_no_, what); }

double CsvReader::number(std::string_view field, const char* name) const {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    fail(std::string("invalid ") + name + " '" + std::string(field) + "'");
  }
  return v;
}

std::optional<double> CsvReader::maybe_number(std::string_view field, const char* name) const {
  if (field.empty() || field == "NA" || field == "nan" || field == "NaN") return std::nullopt;
  return number(field, name);
}

}  // namespace aemos::ingest::detail
