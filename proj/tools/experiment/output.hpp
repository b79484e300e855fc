// Copyright 2026 The cqed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace cqed::cli {

// Fixed-schema CSV table. The first line names the table and schema version.
class CsvTable {
 public:
  CsvTable(std::string name, std::vector<std::string> columns);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return rows_.size(); }

  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(long v);
    Row& operator<<(int v) { return *this << static_cast<long>(v); }
    Row& operator<<(const std::string& s);
    Row& operator<<(const char* s) { return *this << std::string(s); }

   private:
    friend class CsvTable;
    explicit Row(std::vector<std::string>& cells) : cells_(cells) {}
    std::vector<std::string>& cells_;
  };
  // Cells must be streamed in column order; write() checks the count.
  Row row();

  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline constexpr const char* kSchemaVersion = "v1";

// Ten significant digits: stable across runs, far below any tolerance used.
std::string format_number(double v);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
  bool dashed = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

std::string render_svg(const Plot& p);
void write_svg(const Plot& p, const std::string& path);

void write_text(const std::string& path, const std::string& text);

}  // namespace cqed::cli
