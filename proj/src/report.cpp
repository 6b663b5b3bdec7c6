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

#include "gee/report.hpp"

#include <cstdio>
#include <fstream>

#include "gee/error.hpp"

namespace gee {

using nlohmann::json;

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string html_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string to_csv(const std::vector<Table>& tables) {
  std::string out;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    if (t > 0) out += '\n';
    for (const auto& row : tables[t].rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c > 0) out += ',';
        out += csv_cell(row[c]);
      }
      out += '\n';
    }
  }
  return out;
}

std::string to_html(const std::vector<Table>& tables, std::string_view page_title) {
  std::string out = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>" +
                    html_escape(page_title) +
                    "</title>\n<style>table{border-collapse:collapse;margin-bottom:1.5em}"
                    "td,th{border:1px solid #999;padding:2px 8px}td.n{text-align:right}</style>\n"
                    "</head>\n<body>\n<h1>" +
                    html_escape(page_title) + "</h1>\n";
  for (const auto& t : tables) {
    if (!t.title.empty()) out += "<h2>" + html_escape(t.title) + "</h2>\n";
    out += "<table>\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      out += "<tr>";
      for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
        const auto& cell = t.rows[r][c];
        if (r == 0) {
          out += "<th>" + html_escape(cell) + "</th>";
        } else {
          out += c == 0 ? "<td>" : "<td class=\"n\">";
          out += html_escape(cell) + "</td>";
        }
      }
      out += "</tr>\n";
    }
    out += "</table>\n";
    if (!t.caption.empty()) out += "<p>" + html_escape(t.caption) + "</p>\n";
  }
  return out + "</body>\n</html>\n";
}

Table edit_match_table(const EditMatchReport& r) {
  return {"Edit extraction",
          {{"Metric", "Value"},
           {"Recall", fixed3(r.recall)},
           {"Precision", fixed3(r.precision)},
           {"F1", fixed3(r.f1)},
           {"True positives", std::to_string(r.tp)},
           {"False positives", std::to_string(r.fp)},
           {"False negatives", std::to_string(r.fn)}},
          ""};
}

json to_json(const EditMatchReport& r) {
  json queue = json::array();
  for (const auto& item : r.review_queue) {
    queue.push_back({{"pair_id", item.pair_id},
                     {"edit", edits_to_json(std::span<const AtomicEdit>(&item.edit, 1))[0]},
                     {"status", std::string(to_string(item.status))},
                     {"adjudicated", item.adjudicated}});
  }
  return {{"tp", r.tp},     {"fp", r.fp},     {"fn", r.fn},         {"precision", r.precision},
          {"recall", r.recall}, {"f1", r.f1}, {"review_queue", queue}};
}

namespace {

constexpr std::pair<MistakeLabel, const char*> kRows[] = {
    {MistakeLabel::Correct, "Fully correct"},
    {MistakeLabel::WrongEditDescription, "Wrong edit description"},
    {MistakeLabel::WrongEditReason, "Wrong edit reason"},
    {MistakeLabel::WrongErrorType, "Wrong error type"},
    {MistakeLabel::HallucinatedError, "Hallucinated error"},
};

std::size_t count_of(const AnnotationSummary& s, MistakeLabel l) {
  auto it = s.counts.find(l);
  return it == s.counts.end() ? 0 : it->second;
}

}  // namespace

std::vector<Table> annotation_tables(const AnnotationSummary& s) {
  std::vector<Table> out;
  Table t{"Explanation quality", {{"Category", "Count", "Percentage"}}, ""};
  for (const auto& [label, name] : kRows) {
    t.rows.push_back({name, std::to_string(count_of(s, label)), format_percent(s.percentage(label))});
  }
  t.rows.push_back({"Total explanation count", std::to_string(s.explanations),
                    format_percent(s.explanations == 0 ? 0.0 : 100.0)});
  t.rows.push_back({"Total annotated items", std::to_string(s.items), ""});
  t.rows.push_back({"Missing error", std::to_string(s.missing_errors), ""});
  out.push_back(std::move(t));
  if (s.agreement) {
    const auto& a = *s.agreement;
    const auto n = a.total();
    Table g{"Annotator agreement",
            {{"Category", "Count", "Percentage"},
             {"Fully agree", std::to_string(a.fully_agree), format_percent(percent(a.fully_agree, n))},
             {"Disagree on missing errors", std::to_string(a.disagree_missing),
              format_percent(percent(a.disagree_missing, n))},
             {"Disagree on other mistakes", std::to_string(a.disagree_other),
              format_percent(percent(a.disagree_other, n))},
             {"Total", std::to_string(n), format_percent(n == 0 ? 0.0 : 100.0)},
             {"Agreement rate", "", format_percent(100.0 * a.rate())}},
            "Agreement rate counts full agreement and disagreement on missing errors only."};
    out.push_back(std::move(g));
  }
  return out;
}

json to_json(const AnnotationSummary& s) {
  json counts = json::object();
  json pct = json::object();
  for (const auto& [label, name] : kRows) {
    counts[std::string(to_string(label))] = count_of(s, label);
    pct[std::string(to_string(label))] = format_percent(s.percentage(label));
  }
  json j = {{"counts", counts},
            {"percentages", pct},
            {"explanations", s.explanations},
            {"items", s.items},
            {"missing_errors", s.missing_errors}};
  if (s.agreement) {
    const auto& a = *s.agreement;
    j["agreement"] = {{"fully_agree", a.fully_agree},
                      {"disagree_missing", a.disagree_missing},
                      {"disagree_other", a.disagree_other},
                      {"total", a.total()},
                      {"rate", format_percent(100.0 * a.rate())},
                      {"fully_agree_rate", format_percent(100.0 * a.fully_agree_rate())}};
  }
  return j;
}

void write_report(const std::filesystem::path& json_path, const json& data, const std::vector<Table>& tables,
                  std::string_view title) {
  write_file(json_path, data.dump(2) + "\n");
  auto csv = json_path;
  csv.replace_extension(".csv");
  write_file(csv, to_csv(tables));
  auto html = json_path;
  html.replace_extension(".html");
  write_file(html, to_html(tables, title));
}

}  // namespace gee
