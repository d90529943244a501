#include "vitals/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "vitals/error.hpp"

namespace vitals {

namespace {

constexpr const char* kReferenceMethod = "hexoskin";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

bool close4(double a, double b) { return std::fabs(a - b) < 5e-5; }

}  // namespace

const char* to_string(Metric m) { return m == Metric::hr ? "hr" : "rr"; }

RmseEntry rmse(const ReferenceSeries& ref, const ReferenceSeries& est) {
  std::map<long, double> ref_by_t(ref.rows.begin(), ref.rows.end());
  double sum_sq = 0.0;
  long n = 0;
  for (const auto& [t, v] : est.rows) {
    if (auto it = ref_by_t.find(t); it != ref_by_t.end()) {
      const double d = v - it->second;
      sum_sq += d * d;
      ++n;
    }
  }
  if (n == 0) {
    throw AlignmentError("rmse: " + ref.method + " and " + est.method +
                         " share no timestamps");
  }
  RmseEntry e;
  e.method = est.method;
  e.metric = est.metric;
  e.rmse = std::sqrt(sum_sq / static_cast<double>(n));
  e.n = n;
  if (e.metric == Metric::hr) e.aami_pass = aami_check(e);
  return e;
}

bool aami_check(const RmseEntry& entry) {
  if (entry.metric != Metric::hr) {
    throw ConfigError("aami_check: the EC-13 bound applies to HR entries");
  }
  return entry.rmse < 5.0;
}

RmseReport table_report(const std::string& reference_csv_path,
                        const std::vector<ReferenceSeries>& extra,
                        const std::optional<std::string>& published_json) {
  std::ifstream in(reference_csv_path);
  if (!in) throw IoError("cannot open " + reference_csv_path);

  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw ParseError(reference_csv_path + ": empty file");
  }
  const std::vector<std::string> header = split_csv_line(header_line);
  if (header.empty() || header[0] != "time_s") {
    throw ParseError(reference_csv_path + ": first column must be time_s");
  }

  std::vector<ReferenceSeries> columns(header.size() > 1 ? header.size() - 1 : 0);
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& name = header[c];
    const auto us = name.rfind('_');
    if (us == std::string::npos || us + 1 >= name.size()) {
      throw ParseError(reference_csv_path + ": column '" + name +
                       "' is not of the form method_metric");
    }
    const std::string metric = name.substr(us + 1);
    if (metric != "hr" && metric != "rr") {
      throw ParseError(reference_csv_path + ": column '" + name +
                       "' has unknown metric '" + metric + "'");
    }
    columns[c - 1].method = name.substr(0, us);
    columns[c - 1].metric = metric == "hr" ? Metric::hr : Metric::rr;
  }

  std::string line;
  long line_no = 1;
  long prev_t = -1;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(reference_csv_path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    }
    long t;
    try {
      t = std::lround(std::stod(cells[0]));
    } catch (const std::exception&) {
      throw ParseError(reference_csv_path + ":" + std::to_string(line_no) + ": bad time '" +
                       cells[0] + "'");
    }
    if (!first_row && t <= prev_t) {
      throw ParseError(reference_csv_path + ":" + std::to_string(line_no) +
                       ": timestamps must increase");
    }
    first_row = false;
    prev_t = t;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c].empty()) continue;  // blank cell = missing observation
      try {
        columns[c - 1].rows.emplace_back(t, std::stod(cells[c]));
      } catch (const std::exception&) {
        throw ParseError(reference_csv_path + ":" + std::to_string(line_no) + ": bad value '" +
                         cells[c] + "'");
      }
    }
  }

  const ReferenceSeries* ref_hr = nullptr;
  const ReferenceSeries* ref_rr = nullptr;
  for (const ReferenceSeries& col : columns) {
    if (col.method != kReferenceMethod) continue;
    (col.metric == Metric::hr ? ref_hr : ref_rr) = &col;
  }

  auto reference_for = [&](Metric m) -> const ReferenceSeries& {
    const ReferenceSeries* ref = m == Metric::hr ? ref_hr : ref_rr;
    if (!ref) {
      throw ConfigError(reference_csv_path + ": missing reference column " +
                        std::string(kReferenceMethod) + "_" + to_string(m));
    }
    return *ref;
  };

  RmseReport report;
  report.reference_method = kReferenceMethod;
  for (const ReferenceSeries& col : columns) {
    if (col.method == kReferenceMethod) continue;
    report.entries.push_back(rmse(reference_for(col.metric), col));
  }
  for (const ReferenceSeries& series : extra) {
    report.entries.push_back(rmse(reference_for(series.metric), series));
  }

  if (published_json) {
    std::ifstream pj(*published_json);
    if (!pj) throw IoError("cannot open " + *published_json);
    nlohmann::json j;
    try {
      pj >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(*published_json + ": " + e.what());
    }
    auto published_for = [&](const RmseEntry& e) -> std::optional<double> {
      const char* metric = to_string(e.metric);
      if (j.contains(metric) && j[metric].contains(e.method)) {
        return j[metric][e.method].get<double>();
      }
      return std::nullopt;
    };
    for (const RmseEntry& e : report.entries) {
      const auto pub = published_for(e);
      if (!pub || close4(e.rmse, *pub)) continue;
      std::string note = std::string(to_string(e.metric)) + " " + e.method + ": computed " +
                         fmt4(e.rmse) + " differs from published " + fmt4(*pub);
      // transposed published cells show up as a crossed match within the metric
      for (const RmseEntry& other : report.entries) {
        if (&other == &e || other.metric != e.metric) continue;
        const auto other_pub = published_for(other);
        if (other_pub && close4(e.rmse, *other_pub) && pub && close4(other.rmse, *pub)) {
          note += "; matches published " + other.method +
                  " instead (published cells appear swapped)";
          break;
        }
      }
      report.notes.push_back(note);
    }
  }
  return report;
}

std::string report_to_json(const RmseReport& report) {
  std::string s = "{\"reference\":\"" + report.reference_method + "\",\"entries\":[";
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const RmseEntry& e = report.entries[i];
    if (i) s += ",";
    s += "{\"method\":\"" + e.method + "\",\"metric\":\"" + to_string(e.metric) +
         "\",\"rmse\":" + fmt4(e.rmse) + ",\"n\":" + std::to_string(e.n);
    if (e.aami_pass) {
      s += std::string(",\"aami_pass\":") + (*e.aami_pass ? "true" : "false");
    }
    s += "}";
  }
  s += "],\"notes\":[";
  for (std::size_t i = 0; i < report.notes.size(); ++i) {
    if (i) s += ",";
    nlohmann::json esc = report.notes[i];
    s += esc.dump();
  }
  s += "]}";
  return s;
}

std::string report_to_text(const RmseReport& report) {
  std::string s = "method        metric    rmse  n    aami\n";
  for (const RmseEntry& e : report.entries) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-12s  %-4s  %8s  %-3ld  %s\n", e.method.c_str(),
                  to_string(e.metric), fmt4(e.rmse).c_str(), e.n,
                  e.aami_pass ? (*e.aami_pass ? "pass" : "fail") : "-");
    s += buf;
  }
  for (const std::string& note : report.notes) {
    s += "note: " + note + "\n";
  }
  return s;
}

}  // namespace vitals
