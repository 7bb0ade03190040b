#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "depthedge/edges/edges.hpp"
#include "depthedge/metrics/metrics.hpp"

namespace depthedge::metrics {

inline constexpr int kReportSchemaVersion = 1;

struct EvalConfig {
  CropSpec crop{};
  std::optional<ClipRange> clip = ClipRange{};  // predictions only; nullopt disables
  std::vector<edges::SigmaPreset> presets = edges::standard_presets();
  double theta = 10.0;            // chamfer truncation radius, px
  double gauss_sigma = 1.0;       // Canny smoothing, px
  double d_ref = 3.0;             // plane for the directed depth error, m
  double degenerate_ratio = 0.5;  // flag a DBE value when more edges than this were truncated
  bool pixel_weighted = false;    // aggregate by valid-pixel count instead of per image

  void validate() const;
  bool operator==(const EvalConfig&) const = default;
};

/// DBE numbers for one (sigma_low, sigma_high) pair. Missing values mean the
/// metric is undefined (no predicted edges, no annotation, flat prediction).
struct DbeEntry {
  std::string label;
  double sigma_low = 0.0;
  double sigma_high = 0.0;
  std::optional<double> acc;
  std::optional<double> comp;
  std::size_t pred_edge_pixels = 0;
  std::size_t gt_edge_pixels = 0;
  double acc_truncated_fraction = 0.0;
  double comp_truncated_fraction = 0.0;
  bool acc_degenerate = false;
  bool comp_degenerate = false;
  std::size_t images = 0;  // images contributing (aggregates only)

  bool operator==(const DbeEntry&) const = default;
};

struct EvalReport {
  int schema_version = kReportSchemaVersion;
  std::string id;
  double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;
  double rel = 0.0, log10 = 0.0, rmse_lin = 0.0, rmse_log = 0.0;
  std::vector<DbeEntry> dbe;
  std::optional<double> dde_0, dde_minus, dde_plus;
  std::size_t valid_pixels = 0;
  std::size_t images = 1;
  EvalConfig config;
  std::optional<std::string> timestamp;

  const DbeEntry* find_dbe(const std::string& label) const;
  bool operator==(const EvalReport&) const = default;
};

}  // namespace depthedge::metrics
