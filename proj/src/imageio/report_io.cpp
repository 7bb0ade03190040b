#include "depthedge/imageio/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "depthedge/core/errors.hpp"

namespace depthedge::imageio {
namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

const Json& at(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("report: missing key '") + key + "'", 0);
  return *it;
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return at(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: bad value for '") + key + "': " + e.what(), 0);
  }
}

std::optional<double> get_opt(const Json& j, const char* key) {
  const Json& v = at(j, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw ParseError(std::string("report: '") + key + "' is not a number", 0);
  return v.get<double>();
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string full(const std::optional<double>& v) { return v ? full(*v) : "undefined"; }

}  // namespace

Json config_to_json(const metrics::EvalConfig& cfg) {
  Json j;
  j["crop"] = cfg.crop.to_string();
  j["clip"] = cfg.clip ? Json::array({cfg.clip->min, cfg.clip->max}) : Json(nullptr);
  Json presets = Json::array();
  for (const edges::SigmaPreset& p : cfg.presets)
    presets.push_back({{"name", p.name}, {"sigma_low", p.sigma_low}, {"sigma_high", p.sigma_high}});
  j["presets"] = presets;
  j["theta"] = cfg.theta;
  j["gauss_sigma"] = cfg.gauss_sigma;
  j["d_ref"] = cfg.d_ref;
  j["degenerate_ratio"] = cfg.degenerate_ratio;
  j["pixel_weighted"] = cfg.pixel_weighted;
  return j;
}

metrics::EvalConfig config_from_json(const Json& j) {
  metrics::EvalConfig cfg;
  try {
    cfg.crop = metrics::CropSpec::parse(get<std::string>(j, "crop"));
  } catch (const ParameterError& e) {
    throw ParseError(std::string("report: ") + e.what(), 0);
  }
  const Json& clip = at(j, "clip");
  if (clip.is_null()) {
    cfg.clip.reset();
  } else {
    if (!clip.is_array() || clip.size() != 2) throw ParseError("report: clip must be [min, max] or null", 0);
    cfg.clip = metrics::ClipRange{clip[0].get<double>(), clip[1].get<double>()};
  }
  cfg.presets.clear();
  for (const Json& p : at(j, "presets"))
    cfg.presets.push_back({get<std::string>(p, "name"), get<double>(p, "sigma_low"), get<double>(p, "sigma_high")});
  cfg.theta = get<double>(j, "theta");
  cfg.gauss_sigma = get<double>(j, "gauss_sigma");
  cfg.d_ref = get<double>(j, "d_ref");
  cfg.degenerate_ratio = get<double>(j, "degenerate_ratio");
  cfg.pixel_weighted = get<bool>(j, "pixel_weighted");
  return cfg;
}

Json report_to_json(const metrics::EvalReport& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["id"] = r.id;
  j["images"] = r.images;
  j["delta1"] = r.delta1;
  j["delta2"] = r.delta2;
  j["delta3"] = r.delta3;
  j["rel"] = r.rel;
  j["log10"] = r.log10;
  j["rmse_lin"] = r.rmse_lin;
  j["rmse_log"] = r.rmse_log;
  Json acc = Json::object(), comp = Json::object(), details = Json::array();
  for (const metrics::DbeEntry& e : r.dbe) {
    acc[e.label] = opt(e.acc);
    comp[e.label] = opt(e.comp);
    details.push_back({{"label", e.label},
                       {"sigma_low", e.sigma_low},
                       {"sigma_high", e.sigma_high},
                       {"acc", opt(e.acc)},
                       {"comp", opt(e.comp)},
                       {"pred_edge_pixels", e.pred_edge_pixels},
                       {"gt_edge_pixels", e.gt_edge_pixels},
                       {"acc_truncated_fraction", e.acc_truncated_fraction},
                       {"comp_truncated_fraction", e.comp_truncated_fraction},
                       {"acc_degenerate", e.acc_degenerate},
                       {"comp_degenerate", e.comp_degenerate},
                       {"images", e.images}});
  }
  j["dbe_acc"] = acc;
  j["dbe_comp"] = comp;
  j["dde_0"] = opt(r.dde_0);
  j["dde_minus"] = opt(r.dde_minus);
  j["dde_plus"] = opt(r.dde_plus);
  j["valid_pixels"] = r.valid_pixels;
  j["dbe"] = details;
  j["config"] = config_to_json(r.config);
  if (r.timestamp) j["timestamp"] = *r.timestamp;
  return j;
}

metrics::EvalReport report_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("report: top level is not an object", 0);
  metrics::EvalReport r;
  r.schema_version = get<int>(j, "schema_version");
  if (r.schema_version != metrics::kReportSchemaVersion)
    throw ParseError("report: unsupported schema_version " + std::to_string(r.schema_version), 0);
  r.id = get<std::string>(j, "id");
  r.images = get<std::size_t>(j, "images");
  r.delta1 = get<double>(j, "delta1");
  r.delta2 = get<double>(j, "delta2");
  r.delta3 = get<double>(j, "delta3");
  r.rel = get<double>(j, "rel");
  r.log10 = get<double>(j, "log10");
  r.rmse_lin = get<double>(j, "rmse_lin");
  r.rmse_log = get<double>(j, "rmse_log");
  for (const Json& d : at(j, "dbe")) {
    metrics::DbeEntry e;
    e.label = get<std::string>(d, "label");
    e.sigma_low = get<double>(d, "sigma_low");
    e.sigma_high = get<double>(d, "sigma_high");
    e.acc = get_opt(d, "acc");
    e.comp = get_opt(d, "comp");
    e.pred_edge_pixels = get<std::size_t>(d, "pred_edge_pixels");
    e.gt_edge_pixels = get<std::size_t>(d, "gt_edge_pixels");
    e.acc_truncated_fraction = get<double>(d, "acc_truncated_fraction");
    e.comp_truncated_fraction = get<double>(d, "comp_truncated_fraction");
    e.acc_degenerate = get<bool>(d, "acc_degenerate");
    e.comp_degenerate = get<bool>(d, "comp_degenerate");
    e.images = get<std::size_t>(d, "images");
    r.dbe.push_back(std::move(e));
  }
  r.dde_0 = get_opt(j, "dde_0");
  r.dde_minus = get_opt(j, "dde_minus");
  r.dde_plus = get_opt(j, "dde_plus");
  r.valid_pixels = get<std::size_t>(j, "valid_pixels");
  r.config = config_from_json(at(j, "config"));
  if (j.contains("timestamp")) r.timestamp = get<std::string>(j, "timestamp");
  return r;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failure on " + path.string());
}

void write_report(const metrics::EvalReport& r, const std::filesystem::path& path) {
  write_text(path, dump_json(report_to_json(r)));
}

metrics::EvalReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  return report_from_json(j);
}

std::string format_cell(std::optional<double> v, int precision) {
  if (!v) return "undefined";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string table_header(const std::vector<edges::SigmaPreset>& presets) {
  std::string h = "method,delta1,delta2,delta3,rel,log10,rmse_lin,rmse_log";
  for (const edges::SigmaPreset& p : presets) h += ",dbe_acc_" + p.name;
  return h + "\n";
}

std::string table_row(const std::string& method, const metrics::EvalReport& r,
                      const std::vector<edges::SigmaPreset>& presets) {
  std::string row = csv_field(method);
  for (double v : {r.delta1, r.delta2, r.delta3, r.rel, r.log10, r.rmse_lin, r.rmse_log})
    row += "," + format_cell(v);
  for (const edges::SigmaPreset& p : presets) {
    const metrics::DbeEntry* e = r.find_dbe(p.name);
    row += "," + format_cell(e ? e->acc : std::nullopt);
  }
  return row + "\n";
}

std::string detail_header(const std::vector<edges::SigmaPreset>& presets) {
  std::string h = "id,valid_pixels,delta1,delta2,delta3,rel,log10,rmse_lin,rmse_log,dde_0,dde_minus,dde_plus";
  for (const edges::SigmaPreset& p : presets)
    h += ",dbe_acc_" + p.name + ",dbe_comp_" + p.name + ",dbe_acc_degenerate_" + p.name;
  return h + "\n";
}

std::string detail_row(const metrics::EvalReport& r, const std::vector<edges::SigmaPreset>& presets) {
  std::ostringstream row;
  row << csv_field(r.id) << ',' << r.valid_pixels;
  for (double v : {r.delta1, r.delta2, r.delta3, r.rel, r.log10, r.rmse_lin, r.rmse_log}) row << ',' << full(v);
  row << ',' << full(r.dde_0) << ',' << full(r.dde_minus) << ',' << full(r.dde_plus);
  for (const edges::SigmaPreset& p : presets) {
    const metrics::DbeEntry* e = r.find_dbe(p.name);
    row << ',' << full(e ? e->acc : std::nullopt) << ',' << full(e ? e->comp : std::nullopt) << ','
        << ((e && e->acc_degenerate) ? 1 : 0);
  }
  row << '\n';
  return row.str();
}

}  // namespace depthedge::imageio
