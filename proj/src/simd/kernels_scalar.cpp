#include <cmath>

#include "kernels_impl.hpp"

namespace depthedge::simd::scalar {

void correlate(const double* src, std::size_t n, const double* taps, std::size_t ntaps,
               double* dst) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ntaps; ++k) acc += taps[k] * src[i + k];
    dst[i] = acc;
  }
}

void weighted_rows(const double* const* rows, const double* taps, std::size_t ntaps, std::size_t n,
                   double* dst) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ntaps; ++k) acc += taps[k] * rows[k][i];
    dst[i] = acc;
  }
}

void scaled_diff(const double* a, const double* b, double scale, std::size_t n, double* dst) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = (a[i] - b[i]) * scale;
}

void magnitude(const double* gx, const double* gy, std::size_t n, double* dst) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
}

LinearErrorSums linear_errors(const double* pred, const double* gt, const std::uint8_t* mask,
                              std::size_t n) {
  LinearErrorSums s;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const double p = pred[i];
    const double g = gt[i];
    const double d = p - g;
    s.abs_rel += std::abs(d) / g;
    s.sq += d * d;
    const double ratio = std::max(p / g, g / p);
    for (std::size_t t = 0; t < 3; ++t)
      if (ratio < kDeltaThresholds[t]) ++s.within[t];
    ++s.count;
  }
  return s;
}

LogErrorSums log_errors(const double* log_pred, const double* log_gt, const std::uint8_t* mask,
                        std::size_t n) {
  LogErrorSums s;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const double d = log_pred[i] - log_gt[i];
    s.abs += std::abs(d);
    s.sq += d * d;
    ++s.count;
  }
  return s;
}

}  // namespace depthedge::simd::scalar
