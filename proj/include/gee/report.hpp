// Copyright 2026 The GEE Toolkit Authors
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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gee/eval.hpp"
#include "json.hpp"

namespace gee {

// A plain table rendered to CSV or HTML. The first row is the header.
struct Table {
  std::string title;
  std::vector<std::vector<std::string>> rows;
  std::string caption;
};

std::string to_csv(const std::vector<Table>& tables);
std::string to_html(const std::vector<Table>& tables, std::string_view page_title);
std::string html_escape(std::string_view text);

// Recall / precision / F1 rows plus the raw counts.
Table edit_match_table(const EditMatchReport& report);
nlohmann::json to_json(const EditMatchReport& report);

// Mistake counts with percentages, then the agreement table when present.
std::vector<Table> annotation_tables(const AnnotationSummary& summary);
nlohmann::json to_json(const AnnotationSummary& summary);

// Writes `json_path` plus .csv and .html siblings built from `tables`.
void write_report(const std::filesystem::path& json_path, const nlohmann::json& data,
                  const std::vector<Table>& tables, std::string_view title);

}  // namespace gee
