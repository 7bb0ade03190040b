#pragma once

#include <algorithm>

#include "depthedge/simd/kernels.hpp"

namespace depthedge::simd {

// 1.25^i for i = 1..3; all exactly representable.
inline constexpr double kDeltaThresholds[3] = {1.25, 1.5625, 1.953125};

namespace scalar {
void correlate(const double* src, std::size_t n, const double* taps, std::size_t ntaps,
               double* dst);
void weighted_rows(const double* const* rows, const double* taps, std::size_t ntaps, std::size_t n,
                   double* dst);
void scaled_diff(const double* a, const double* b, double scale, std::size_t n, double* dst);
void magnitude(const double* gx, const double* gy, std::size_t n, double* dst);
LinearErrorSums linear_errors(const double* pred, const double* gt, const std::uint8_t* mask,
                              std::size_t n);
LogErrorSums log_errors(const double* log_pred, const double* log_gt, const std::uint8_t* mask,
                        std::size_t n);
}  // namespace scalar

#if defined(DEPTHEDGE_HAVE_AVX2)
namespace avx2 {
void correlate(const double* src, std::size_t n, const double* taps, std::size_t ntaps,
               double* dst);
void weighted_rows(const double* const* rows, const double* taps, std::size_t ntaps, std::size_t n,
                   double* dst);
void scaled_diff(const double* a, const double* b, double scale, std::size_t n, double* dst);
void magnitude(const double* gx, const double* gy, std::size_t n, double* dst);
LinearErrorSums linear_errors(const double* pred, const double* gt, const std::uint8_t* mask,
                              std::size_t n);
LogErrorSums log_errors(const double* log_pred, const double* log_gt, const std::uint8_t* mask,
                        std::size_t n);
}  // namespace avx2
#endif

}  // namespace depthedge::simd
