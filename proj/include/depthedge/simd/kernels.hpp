#pragma once

// Data-parallel inner loops used by the edge detector and the depth metrics.
//
// Every kernel has a portable scalar reference and, where the build and the
// CPU allow, an AVX2 variant. The variant is picked once at first use; set
// DEPTHEDGE_ISA=scalar (or avx2) in the environment to force one.
//
// Element-wise kernels are bit-identical across variants (same operation
// order, no FMA contraction). Reductions differ only by summation order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace depthedge::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct LinearErrorSums {
  double abs_rel = 0.0;  // sum |p - g| / g
  double sq = 0.0;       // sum (p - g)^2
  std::size_t count = 0;
  std::array<std::size_t, 3> within{};  // max(p/g, g/p) < 1.25^(i+1)
};

struct LogErrorSums {
  double abs = 0.0;  // sum |lp - lg|
  double sq = 0.0;   // sum (lp - lg)^2
  std::size_t count = 0;
};

struct KernelTable {
  Isa isa;

  // dst[i] = sum_k taps[k] * src[i + k], i in [0, n). src holds n + ntaps - 1
  // entries. Taps are accumulated in index order.
  void (*correlate)(const double* src, std::size_t n, const double* taps, std::size_t ntaps,
                    double* dst);

  // dst[i] = sum_k taps[k] * rows[k][i], k in index order.
  void (*weighted_rows)(const double* const* rows, const double* taps, std::size_t ntaps,
                        std::size_t n, double* dst);

  // dst[i] = (a[i] - b[i]) * scale
  void (*scaled_diff)(const double* a, const double* b, double scale, std::size_t n, double* dst);

  // dst[i] = sqrt(gx[i]^2 + gy[i]^2)
  void (*magnitude)(const double* gx, const double* gy, std::size_t n, double* dst);

  // Masked sums for the linear depth metrics. Masked-out entries may hold
  // anything, including zeros and non-finite values.
  LinearErrorSums (*linear_errors)(const double* pred, const double* gt, const std::uint8_t* mask,
                                   std::size_t n);

  // Masked sums over log-depth residuals.
  LogErrorSums (*log_errors)(const double* log_pred, const double* log_gt,
                             const std::uint8_t* mask, std::size_t n);
};

/// Kernels selected for this process.
const KernelTable& kernels();

/// Table for a specific ISA, or nullptr when it is not compiled in or not
/// supported by the running CPU.
const KernelTable* kernels_for(Isa isa);

/// Every ISA usable on this machine, scalar first.
std::vector<Isa> available_isas();

}  // namespace depthedge::simd
