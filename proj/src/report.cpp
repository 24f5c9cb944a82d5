#include "surfbench/report.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace surfbench {

namespace {

using nlohmann::ordered_json;

std::string number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json to_json(const ReportRow& row) {
  ordered_json j;
  j["mesh"] = row.mesh;
  j["challenge"] = row.challenge;
  j["severity"] = row.severity;
  j["cd"] = row.metrics.cd;
  j["fscore"] = row.metrics.fscore;
  j["precision"] = row.metrics.precision;
  j["recall"] = row.metrics.recall;
  j["ncs"] = row.metrics.ncs;
  j["nfs"] = row.metrics.nfs ? ordered_json(*row.metrics.nfs) : ordered_json(nullptr);
  j["preset"] = row.metrics.preset;
  j["seed"] = row.metrics.seed;
  j["degraded_ncs"] = row.metrics.degraded_ncs;
  return j;
}

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out;
  for (std::size_t c = 0; c < std::size(kReportColumns); ++c) out += (c ? "," : "") + std::string(kReportColumns[c]);
  out += '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out += csv_field(r.mesh) + ',' + csv_field(r.challenge) + ',' + csv_field(r.severity) + ',' + number(m.cd) + ',' +
           number(m.fscore) + ',' + number(m.precision) + ',' + number(m.recall) + ',' + number(m.ncs) + ',' +
           (m.nfs ? number(*m.nfs) : std::string()) + ',' + csv_field(m.preset) + ',' + std::to_string(m.seed) + '\n';
  }
  return out;
}

std::string report_json(const std::vector<ReportRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

std::vector<ReportRow> parse_report_json(const std::string& text) {
  std::vector<ReportRow> rows;
  try {
    const auto arr = ordered_json::parse(text);
    if (!arr.is_array()) throw ValidationError("report JSON must be an array");
    for (const auto& j : arr) {
      ReportRow r;
      r.mesh = j.at("mesh").get<std::string>();
      r.challenge = j.at("challenge").get<std::string>();
      r.severity = j.at("severity").get<std::string>();
      r.metrics.cd = j.at("cd").get<double>();
      r.metrics.fscore = j.at("fscore").get<double>();
      r.metrics.precision = j.at("precision").get<double>();
      r.metrics.recall = j.at("recall").get<double>();
      r.metrics.ncs = j.at("ncs").get<double>();
      if (!j.at("nfs").is_null()) r.metrics.nfs = j.at("nfs").get<double>();
      r.metrics.preset = j.at("preset").get<std::string>();
      r.metrics.seed = j.at("seed").get<std::uint64_t>();
      r.metrics.degraded_ncs = j.value("degraded_ncs", false);
      rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what());
  }
  return rows;
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::filesystem::path& path) {
  if (rows.empty()) throw ValidationError("report needs at least one row");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << (format == ReportFormat::csv ? report_csv(rows) : report_json(rows));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<ReportRow> read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_report_json(ss.str());
}

}  // namespace surfbench
