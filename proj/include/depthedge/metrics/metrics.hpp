#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "depthedge/core/grid.hpp"

namespace depthedge::metrics {

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool operator==(const Rect&) const = default;
};

struct CropSpec {
  enum class Kind { kNone, kEigen, kExplicit };
  Kind kind = Kind::kNone;
  Rect rect{};  // used for kExplicit

  /// Parses "none", "eigen" or "x0,y0,x1,y1".
  static CropSpec parse(const std::string& text);
  std::string to_string() const;

  /// Rectangle for an image of the given size, nullopt for kNone.
  /// The eigen preset is the 640x480 rectangle [41, 601) x [45, 471),
  /// scaled proportionally for other image sizes.
  std::optional<Rect> resolve(int width, int height) const;
  bool operator==(const CropSpec&) const = default;
};

struct ClipRange {
  double min = 0.7;
  double max = 10.0;
  void validate() const;
  bool operator==(const ClipRange&) const = default;
};

/// Clamps valid values into [min, max]; the mask is unchanged.
DepthGrid clip_depth(const DepthGrid& d, const ClipRange& range);

/// Sub-grid (values and mask). Throws DimensionError when rect leaves the image.
template <class T, class Tag>
Grid<T, Tag> crop(const Grid<T, Tag>& g, const Rect& r) {
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > g.width() || r.y1 > g.height() || r.x0 >= r.x1 || r.y0 >= r.y1)
    throw DimensionError("crop rectangle outside the image or empty");
  Grid<T, Tag> out(r.width(), r.height());
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) {
      out(x - r.x0, y - r.y0) = g(x, y);
      out.set_valid(x - r.x0, y - r.y0, g.valid(x, y));
    }
  return out;
}

EdgeMap crop(const EdgeMap& e, const Rect& r);

/// Fraction of pixels valid in both maps with max(p/g, g/p) < 1.25^i, i in 1..3.
double threshold_accuracy(const DepthGrid& pred, const DepthGrid& gt, int i);

struct ErrorMetrics {
  double rel = 0.0;       // mean |p - g| / g
  double log10 = 0.0;     // mean |log10 p - log10 g|
  double rmse_lin = 0.0;  // sqrt(mean (p - g)^2)
  double rmse_log = 0.0;  // sqrt(mean (ln p - ln g)^2)
};

ErrorMetrics error_metrics(const DepthGrid& pred, const DepthGrid& gt);

/// Accuracy and error metrics from a single pass over the shared mask.
struct StandardMetrics {
  std::array<double, 3> delta{};
  ErrorMetrics errors;
  std::size_t valid_pixels = 0;
};

/// Throws EmptyDomainError without shared valid pixels and DomainError on a
/// nonpositive or non-finite depth at a shared valid pixel.
StandardMetrics standard_metrics(const DepthGrid& pred, const DepthGrid& gt);

}  // namespace depthedge::metrics
