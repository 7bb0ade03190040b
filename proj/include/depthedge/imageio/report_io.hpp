#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "depthedge/metrics/report.hpp"
#include "json.hpp"

namespace depthedge::imageio {

using Json = nlohmann::ordered_json;

// Report JSON: fixed key order, doubles printed with round-trip precision,
// undefined metrics as null. "dbe_acc" and "dbe_comp" map preset labels
// ("0.1_0.2", ...) to values; "dbe" carries the per-preset details.

Json report_to_json(const metrics::EvalReport& r);
/// Throws ParseError on a missing key, wrong type or unsupported schema_version.
metrics::EvalReport report_from_json(const Json& j);

Json config_to_json(const metrics::EvalConfig& cfg);
metrics::EvalConfig config_from_json(const Json& j);

/// Two-space indented JSON followed by a newline.
std::string dump_json(const Json& j);

void write_report(const metrics::EvalReport& r, const std::filesystem::path& path);
metrics::EvalReport read_report(const std::filesystem::path& path);

/// Fixed-precision cell ("%.3f" by default); "undefined" for a missing value.
std::string format_cell(std::optional<double> v, int precision = 3);

/// Table-layout CSV: method, delta1..3, rel, log10, rmse_lin, rmse_log, then
/// one DBE accuracy column per preset ("dbe_acc_<label>").
std::string table_header(const std::vector<edges::SigmaPreset>& presets);
std::string table_row(const std::string& method, const metrics::EvalReport& r,
                      const std::vector<edges::SigmaPreset>& presets);

/// Per-image CSV with every scalar in the report (full precision).
std::string detail_header(const std::vector<edges::SigmaPreset>& presets);
std::string detail_row(const metrics::EvalReport& r, const std::vector<edges::SigmaPreset>& presets);

/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(const std::string& s);

/// Writes `text` atomically enough for our purposes (truncate + write).
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace depthedge::imageio
