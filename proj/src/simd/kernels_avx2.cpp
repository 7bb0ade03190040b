// Compiled with -mavx2. Only reached through the dispatcher after a CPUID check.
#include <immintrin.h>

#include <bit>
#include <cmath>
#include <cstring>

#include "kernels_impl.hpp"

namespace depthedge::simd::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];
}

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

// 4 mask bytes -> all-ones lanes where the byte is nonzero.
inline __m256d load_mask(const std::uint8_t* m) {
  std::int32_t bits;
  std::memcpy(&bits, m, sizeof(bits));
  const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(bits));
  const __m256i zero = _mm256_cmpeq_epi64(wide, _mm256_setzero_si256());
  return _mm256_castsi256_pd(_mm256_xor_si256(zero, _mm256_set1_epi64x(-1)));
}

}  // namespace

void correlate(const double* src, std::size_t n, const double* taps, std::size_t ntaps,
               double* dst) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < ntaps; ++k)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(taps[k]), _mm256_loadu_pd(src + i + k)));
    _mm256_storeu_pd(dst + i, acc);
  }
  if (i < n) scalar::correlate(src + i, n - i, taps, ntaps, dst + i);
}

void weighted_rows(const double* const* rows, const double* taps, std::size_t ntaps, std::size_t n,
                   double* dst) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < ntaps; ++k)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(taps[k]), _mm256_loadu_pd(rows[k] + i)));
    _mm256_storeu_pd(dst + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ntaps; ++k) acc += taps[k] * rows[k][i];
    dst[i] = acc;
  }
}

void scaled_diff(const double* a, const double* b, double scale, std::size_t n, double* dst) {
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)), s));
  if (i < n) scalar::scaled_diff(a + i, b + i, scale, n - i, dst + i);
}

void magnitude(const double* gx, const double* gy, std::size_t n, double* dst) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d x = _mm256_loadu_pd(gx + i);
    const __m256d y = _mm256_loadu_pd(gy + i);
    _mm256_storeu_pd(dst + i, _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y))));
  }
  if (i < n) scalar::magnitude(gx + i, gy + i, n - i, dst + i);
}

LinearErrorSums linear_errors(const double* pred, const double* gt, const std::uint8_t* mask,
                              std::size_t n) {
  __m256d acc_rel = _mm256_setzero_pd();
  __m256d acc_sq = _mm256_setzero_pd();
  const __m256d thr[3] = {_mm256_set1_pd(kDeltaThresholds[0]), _mm256_set1_pd(kDeltaThresholds[1]),
                          _mm256_set1_pd(kDeltaThresholds[2])};
  LinearErrorSums s;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d m = load_mask(mask + i);
    const int live = _mm256_movemask_pd(m);
    if (live == 0) continue;
    const __m256d p = _mm256_loadu_pd(pred + i);
    const __m256d g = _mm256_loadu_pd(gt + i);
    const __m256d d = _mm256_sub_pd(p, g);
    acc_rel = _mm256_add_pd(acc_rel, _mm256_and_pd(m, _mm256_div_pd(abs_pd(d), g)));
    acc_sq = _mm256_add_pd(acc_sq, _mm256_and_pd(m, _mm256_mul_pd(d, d)));
    const __m256d ratio = _mm256_max_pd(_mm256_div_pd(p, g), _mm256_div_pd(g, p));
    for (std::size_t t = 0; t < 3; ++t) {
      const int hit = _mm256_movemask_pd(_mm256_and_pd(m, _mm256_cmp_pd(ratio, thr[t], _CMP_LT_OQ)));
      s.within[t] += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(hit)));
    }
    s.count += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(live)));
  }
  s.abs_rel = hsum(acc_rel);
  s.sq = hsum(acc_sq);
  if (i < n) {
    const LinearErrorSums tail = scalar::linear_errors(pred + i, gt + i, mask + i, n - i);
    s.abs_rel += tail.abs_rel;
    s.sq += tail.sq;
    s.count += tail.count;
    for (std::size_t t = 0; t < 3; ++t) s.within[t] += tail.within[t];
  }
  return s;
}

LogErrorSums log_errors(const double* log_pred, const double* log_gt, const std::uint8_t* mask,
                        std::size_t n) {
  __m256d acc_abs = _mm256_setzero_pd();
  __m256d acc_sq = _mm256_setzero_pd();
  LogErrorSums s;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d m = load_mask(mask + i);
    const int live = _mm256_movemask_pd(m);
    if (live == 0) continue;
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(log_pred + i), _mm256_loadu_pd(log_gt + i));
    acc_abs = _mm256_add_pd(acc_abs, _mm256_and_pd(m, abs_pd(d)));
    acc_sq = _mm256_add_pd(acc_sq, _mm256_and_pd(m, _mm256_mul_pd(d, d)));
    s.count += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(live)));
  }
  s.abs = hsum(acc_abs);
  s.sq = hsum(acc_sq);
  if (i < n) {
    const LogErrorSums tail = scalar::log_errors(log_pred + i, log_gt + i, mask + i, n - i);
    s.abs += tail.abs;
    s.sq += tail.sq;
    s.count += tail.count;
  }
  return s;
}

}  // namespace depthedge::simd::avx2
