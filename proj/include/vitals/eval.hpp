#pragma once

#include <optional>
#include <string>
#include <vector>

namespace vitals {

enum class Metric { hr, rr };

const char* to_string(Metric m);

// One method's time series for one metric, timestamps rounded to whole
// seconds and strictly increasing. Gaps are simply missing rows.
struct ReferenceSeries {
  std::string method;
  Metric metric = Metric::hr;
  std::vector<std::pair<long, double>> rows;
};

struct RmseEntry {
  std::string method;
  Metric metric = Metric::hr;
  double rmse = 0.0;
  long n = 0;                        // paired points
  std::optional<bool> aami_pass;     // filled for HR entries
};

struct RmseReport {
  std::string reference_method;
  std::vector<RmseEntry> entries;
  std::vector<std::string> notes;
};

// RMSE over exactly-matching timestamps. Throws AlignmentError when the two
// series share none.
RmseEntry rmse(const ReferenceSeries& ref, const ReferenceSeries& est);

// AAMI EC-13 bound: pass iff RMSE < 5.0 (strict), HR metric only.
bool aami_check(const RmseEntry& entry);

// Parses the reference CSV (header time_s,hexoskin_hr,apple_hr,... with blank
// cells meaning missing) and scores every non-reference column against the
// hexoskin column of its metric. extra series, if given, are scored too.
// published_json, if given, cross-checks computed values against published
// ones and appends notes for mismatches (including transposed column pairs).
RmseReport table_report(const std::string& reference_csv_path,
                        const std::vector<ReferenceSeries>& extra = {},
                        const std::optional<std::string>& published_json = std::nullopt);

std::string report_to_json(const RmseReport& report);
std::string report_to_text(const RmseReport& report);

}  // namespace vitals
