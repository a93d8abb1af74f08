/*
 * Copyright 2026 The iota-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "iota/error.hpp"

namespace iota::io {

// Shortest round-trip representation; identical across runs and platforms.
inline std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string Num(std::uint64_t v) { return std::to_string(v); }

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    Row(header);
  }

  CsvWriter& Row(const std::vector<std::string>& cells) {
    Require(cells.size() == columns_, ErrorKind::kShapeError, "csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    return *this;
  }

  std::string str() const { return out_.str(); }

  void Save(const std::filesystem::path& path) const { WriteFile(path, out_.str()); }

  static void WriteFile(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    Require(static_cast<bool>(f), ErrorKind::kInvalidArgument, "cannot write " + path.string());
    f << text;
  }

 private:
  std::size_t columns_;
  std::ostringstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t Column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    Fail(ErrorKind::kInvalidArgument, "csv has no column " + std::string(name));
  }
};

// Plain comma-separated reader; no quoting.
inline CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  Require(static_cast<bool>(f), ErrorKind::kNotFound, "cannot read " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      Require(cells.size() == table.header.size(), ErrorKind::kShapeError,
              "ragged csv row in " + path.string());
      table.rows.push_back(std::move(cells));
    }
  }
  Require(!first, ErrorKind::kInvalidArgument, "empty csv " + path.string());
  return table;
}

inline double ParseDouble(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  Require(res.ec == std::errc{} && res.ptr == s.data() + s.size(), ErrorKind::kInvalidArgument,
          "not a number: " + s);
  return v;
}

inline std::uint64_t ParseU64(const std::string& s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  Require(res.ec == std::errc{} && res.ptr == s.data() + s.size(), ErrorKind::kInvalidArgument,
          "not an integer: " + s);
  return v;
}

}  // namespace iota::io
