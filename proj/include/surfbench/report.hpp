#pragma once

#include "surfbench/metrics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace surfbench {

/// One evaluated (reconstruction, ground truth) pair.
struct ReportRow {
  std::string mesh;
  std::string challenge;
  std::string severity;
  MetricReport metrics;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

/// Column order of the CSV form.
inline constexpr const char* kReportColumns[] = {"mesh", "challenge", "severity", "cd",  "fscore", "precision",
                                                 "recall", "ncs",     "nfs",      "preset", "seed"};

std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_json(const std::string& text);

enum class ReportFormat { csv, json };

/// Needs at least one row; throws IoError when the file cannot be written.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::filesystem::path& path);
std::vector<ReportRow> read_report_json(const std::filesystem::path& path);

}  // namespace surfbench
