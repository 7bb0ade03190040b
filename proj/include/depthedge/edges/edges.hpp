#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "depthedge/core/grid.hpp"

namespace depthedge::edges {

/// Hysteresis thresholds are fractions of the image's largest gradient
/// magnitude: 0 <= sigma_low < sigma_high. gauss_sigma = 0 disables smoothing.
struct CannyParams {
  double sigma_low = 0.03;
  double sigma_high = 0.05;
  double gauss_sigma = 1.0;

  void validate() const;
};

/// A named (sigma_low, sigma_high) pair.
struct SigmaPreset {
  std::string name;
  double sigma_low;
  double sigma_high;
  bool operator==(const SigmaPreset&) const = default;
};

/// The four threshold pairs reported in the standard DBE table, in column order.
const std::vector<SigmaPreset>& standard_presets();

/// Look up a standard preset by name ("0.1_0.2", "0.01_0.1", "0.005_0.06", "0.03_0.05").
const SigmaPreset* find_preset(const std::string& name);

/// Label for an arbitrary pair, e.g. (0.1, 0.2) -> "0.1_0.2".
std::string preset_label(double sigma_low, double sigma_high);

/// Per-pixel Euclidean distance to the nearest set pixel, in pixels.
/// Infinity everywhere when the source has no set pixel.
using DistanceField = Plane<double>;

/// (v - min) / (max - min) over valid pixels; the mask is kept.
/// Throws EmptyDomainError without valid pixels, DegenerateRangeError when constant.
ScalarField normalize_depth(const DepthGrid& d);

/// Canny edge detector on an image in [0, 1]:
/// Gaussian smoothing, central-difference gradients, non-maximum suppression
/// quantized to 4 directions, then 8-connected hysteresis.
///
/// Ties in non-maximum suppression (equal magnitude within 1e-9 of the
/// image maximum) go to the darker pixel, i.e. the nearer surface of a
/// normalized depth map, so a step yields one edge on its occluding side.
/// Invalid pixels read as 0 and never carry an edge.
EdgeMap canny(const ScalarField& img, const CannyParams& params);

/// Exact Euclidean distance transform (separable lower-envelope algorithm on
/// squared distances).
DistanceField edt(const EdgeMap& src);

struct ChamferResult {
  double value = 0.0;             // mean truncated distance
  std::size_t edge_pixels = 0;    // pixels averaged over
  std::size_t truncated = 0;      // pixels whose distance exceeded theta
  double truncated_fraction() const {
    return edge_pixels ? static_cast<double>(truncated) / static_cast<double>(edge_pixels) : 0.0;
  }
};

/// Mean over set pixels of `from` of their distance to `to`. Distances
/// strictly greater than theta count as 0 but stay in the denominator.
/// Throws UndefinedMetricError when `from` is empty.
ChamferResult truncated_chamfer(const EdgeMap& from, const EdgeMap& to, double theta);

/// Depth boundary error, accuracy: predicted edges against ground truth.
double dbe_accuracy(const EdgeMap& pred, const EdgeMap& gt, double theta = 10.0);

/// Depth boundary error, completeness: ground-truth edges against prediction.
double dbe_completeness(const EdgeMap& pred, const EdgeMap& gt, double theta = 10.0);

/// Directed depth error, in percent. Each valid pixel is placed on the near
/// side (< d_ref) or far side (>= d_ref) of the plane at d_ref for both maps.
struct DdeResult {
  double eps0 = 0.0;       // same side
  double eps_minus = 0.0;  // predicted near, truly far
  double eps_plus = 0.0;   // predicted far, truly near
};

DdeResult dde(const DepthGrid& pred, const DepthGrid& gt, double d_ref = 3.0);

}  // namespace depthedge::edges
