#include "depthedge/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "depthedge/simd/kernels.hpp"

namespace depthedge::metrics {

CropSpec CropSpec::parse(const std::string& text) {
  if (text == "none" || text.empty()) return {};
  if (text == "eigen") return {Kind::kEigen, {}};
  Rect r;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d,%d,%d,%d%c", &r.x0, &r.y0, &r.x1, &r.y1, &tail) != 4)
    throw ParameterError("crop must be none, eigen or x0,y0,x1,y1; got '" + text + "'");
  if (r.x0 < 0 || r.y0 < 0 || r.x1 <= r.x0 || r.y1 <= r.y0)
    throw ParameterError("crop rectangle must satisfy 0 <= x0 < x1 and 0 <= y0 < y1");
  return {Kind::kExplicit, r};
}

std::string CropSpec::to_string() const {
  switch (kind) {
    case Kind::kNone:
      return "none";
    case Kind::kEigen:
      return "eigen";
    case Kind::kExplicit:
      break;
  }
  std::ostringstream os;
  os << rect.x0 << ',' << rect.y0 << ',' << rect.x1 << ',' << rect.y1;
  return os.str();
}

std::optional<Rect> CropSpec::resolve(int width, int height) const {
  switch (kind) {
    case Kind::kNone:
      return std::nullopt;
    case Kind::kExplicit:
      return rect;
    case Kind::kEigen:
      break;
  }
  if (width == 640 && height == 480) return Rect{41, 45, 601, 471};
  auto sx = [&](int v) { return static_cast<int>(std::lround(v * width / 640.0)); };
  auto sy = [&](int v) { return static_cast<int>(std::lround(v * height / 480.0)); };
  return Rect{sx(41), sy(45), sx(601), sy(471)};
}

void ClipRange::validate() const {
  if (!(min > 0.0 && min < max) || !std::isfinite(max))
    throw ParameterError("clip range needs 0 < min < max");
}

DepthGrid clip_depth(const DepthGrid& d, const ClipRange& range) {
  range.validate();
  DepthGrid out = d;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out.valid(i)) out[i] = std::clamp(out[i], range.min, range.max);
  return out;
}

EdgeMap crop(const EdgeMap& e, const Rect& r) {
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > e.width() || r.y1 > e.height() || r.x0 >= r.x1 || r.y0 >= r.y1)
    throw DimensionError("crop rectangle outside the image or empty");
  EdgeMap out(r.width(), r.height(), 0);
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) out(x - r.x0, y - r.y0) = e(x, y);
  return out;
}

StandardMetrics standard_metrics(const DepthGrid& pred, const DepthGrid& gt) {
  require_same_shape(pred, gt, "standard_metrics");
  const Plane<std::uint8_t> mask = mask_and(pred, gt);
  const std::size_t n = mask.size();

  std::vector<double> log_pred(n, 0.0), log_gt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    if (!(pred[i] > 0.0) || !(gt[i] > 0.0) || !std::isfinite(pred[i]) || !std::isfinite(gt[i]))
      throw DomainError("depth metrics need finite positive depths at valid pixels");
    log_pred[i] = std::log(pred[i]);
    log_gt[i] = std::log(gt[i]);
  }

  const simd::KernelTable& k = simd::kernels();
  const simd::LinearErrorSums lin =
      k.linear_errors(pred.values().span().data(), gt.values().span().data(), mask.span().data(), n);
  if (lin.count == 0) throw EmptyDomainError("depth metrics over an empty mask");
  const simd::LogErrorSums lg = k.log_errors(log_pred.data(), log_gt.data(), mask.span().data(), n);

  const double count = static_cast<double>(lin.count);
  StandardMetrics m;
  m.valid_pixels = lin.count;
  for (std::size_t t = 0; t < 3; ++t) m.delta[t] = static_cast<double>(lin.within[t]) / count;
  m.errors.rel = lin.abs_rel / count;
  m.errors.rmse_lin = std::sqrt(lin.sq / count);
  m.errors.log10 = lg.abs / count / std::log(10.0);
  m.errors.rmse_log = std::sqrt(lg.sq / count);
  return m;
}

double threshold_accuracy(const DepthGrid& pred, const DepthGrid& gt, int i) {
  if (i < 1 || i > 3) throw ParameterError("threshold index must be 1, 2 or 3");
  return standard_metrics(pred, gt).delta[static_cast<std::size_t>(i - 1)];
}

ErrorMetrics error_metrics(const DepthGrid& pred, const DepthGrid& gt) {
  return standard_metrics(pred, gt).errors;
}

}  // namespace depthedge::metrics
