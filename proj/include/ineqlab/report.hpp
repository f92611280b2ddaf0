#pragma once

// Report rows and their CSV/JSON serializations. The CSV carries no timing
// data so that repeated runs of the same scenario are byte-identical; wall
// times go to the JSON report only.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ineqlab/evaluation.hpp"

namespace ineqlab {

struct ReportRow {
  std::string scenario;
  int item = 0;     // position of the generating item in the scenario
  int subrow = 0;   // position within the item (e.g. one row per radius)
  InequalityEvaluation ev;
  double wall_time_ms = 0.0;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void sort_rows(std::vector<ReportRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.scenario, a.item, a.subrow) < std::tie(b.scenario, b.item, b.subrow);
  });
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string report_csv(std::vector<ReportRow> rows) {
  sort_rows(rows);
  std::ostringstream out;
  out << "scenario,item,subrow,id,lhs,rhs,slack,tolerance,verdict,flags,intermediates\n";
  for (const auto& row : rows) {
    std::string flags;
    for (const auto& f : row.ev.flags) {
      if (!flags.empty()) flags += '|';
      flags += f;
    }
    std::string inter;
    for (const auto& [k, v] : row.ev.intermediates) {
      if (!inter.empty()) inter += ';';
      inter += k + "=" + format_double(v);
    }
    out << csv_escape(row.scenario) << ',' << row.item << ',' << row.subrow << ','
        << csv_escape(row.ev.id) << ',' << format_double(row.ev.lhs) << ','
        << format_double(row.ev.rhs) << ',' << format_double(row.ev.slack) << ','
        << format_double(row.ev.tolerance) << ',' << (row.ev.verdict ? "pass" : "fail") << ','
        << csv_escape(flags) << ',' << csv_escape(inter) << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json report_json(std::vector<ReportRow> rows) {
  sort_rows(rows);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["scenario"] = row.scenario;
    j["item"] = row.item;
    j["subrow"] = row.subrow;
    j["id"] = row.ev.id;
    j["lhs"] = row.ev.lhs;
    j["rhs"] = row.ev.rhs;
    j["slack"] = row.ev.slack;
    j["tolerance"] = row.ev.tolerance;
    j["verdict"] = row.ev.verdict ? "pass" : "fail";
    j["flags"] = row.ev.flags;
    j["intermediates"] = row.ev.intermediates;
    j["wall_time_ms"] = row.wall_time_ms;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  out << content;
  require(out.good(), "write failed: " + path);
}

}  // namespace ineqlab
