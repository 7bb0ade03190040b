#pragma once

#include <optional>

#include "depthedge/core/grid.hpp"

namespace depthedge::losses {

/// Probabilities are clamped into [kProbEps, 1 - kProbEps] before any log.
inline constexpr double kProbEps = 1e-6;

/// Pixels whose depth gradient or in-plane normal is shorter than this are
/// left out of the depth/normal consensus term.
inline constexpr double kDegenerateGradient = 1e-6;

struct LossWeights {
  double lambda_d = 1.0;
  double lambda_c = 1.0;
  double lambda_n = 1.0;
  double mu = 1.0;  // weight inside the depth/contour consensus term

  void validate() const;
};

struct AttentionParams {
  double alpha = 0.5;  // only used by attention_loss_pixel; contour_loss derives it per image
  double beta = 4.0;
  double gamma = 0.5;

  void validate() const;
};

/// Which class proportion becomes alpha in contour_loss.
enum class AlphaMode {
  kContourFraction,     // alpha = share of contour pixels
  kNonContourFraction,  // alpha = share of background pixels
};

/// How the probability-map magnitude in the depth/contour consensus term is
/// reduced to a scalar.
enum class ContourNorm {
  kMean,    // mean of C over the domain
  kL2Mean,  // sqrt(mean of C^2)
};

/// Sign convention relating in-plane normals to the depth gradient.
/// kCameraFacing: n ~ (dD/dx, dD/dy, -1), so aligned data scores 0.
/// kOutward:      n ~ (-dD/dx, -dD/dy, 1).
enum class NormalConvention { kCameraFacing, kOutward };

struct LossOptions {
  AttentionParams attention{};
  AlphaMode alpha_mode = AlphaMode::kContourFraction;
  ContourNorm contour_norm = ContourNorm::kMean;
  NormalConvention convention = NormalConvention::kCameraFacing;
};

/// Loss value plus the gradients with respect to whichever predictions the
/// term depends on. Gradients are zero (and valid) wherever the input had no
/// influence.
struct LossResult {
  double value = 0.0;
  std::optional<ScalarField> d_depth;
  std::optional<ScalarField> d_contours;
  std::optional<VecField3> d_normals;
};

struct BerhuValue {
  double value;
  double derivative;
};

/// Reverse Huber: |x| for |x| <= c, (x^2 + c^2) / (2c) otherwise.
/// Throws ParameterError unless c > 0.
BerhuValue berhu(double x, double c);

/// Pixel-wise attention loss. `phat` is clamped before use; `p` is the label.
double attention_loss_pixel(double phat, bool p, const AttentionParams& params);

/// d/dphat of attention_loss_pixel (zero outside the clamp interval).
double attention_loss_pixel_grad(double phat, bool p, const AttentionParams& params);

/// BerHu on log residuals plus squared log-gradient residuals, both averaged
/// over the pixels valid in both grids. The BerHu switch point is a fifth of
/// the largest absolute log residual and is held constant for the gradient.
LossResult depth_loss(const DepthGrid& pred, const DepthGrid& gt);

/// Mean attention loss. `gt` must be binary on valid pixels.
LossResult contour_loss(const ProbGrid& pred, const ProbGrid& gt, const AttentionParams& params,
                        AlphaMode mode = AlphaMode::kContourFraction);

/// Mean of (1 - cosine) between predicted and true normals.
LossResult normals_loss(const NormalGrid& pred, const NormalGrid& gt);

/// Couples sharp depth changes to high contour probability. Averaged over
/// pixels where both the depth gradient and Laplacian are defined.
LossResult depth_contour_consensus(const DepthGrid& pred, const ProbGrid& contours, double mu,
                                   ContourNorm norm = ContourNorm::kMean);

/// Mean of (1 - cosine) between the depth gradient and the in-plane part of
/// the predicted normal, over pixels where both are non-degenerate. Returns
/// 0 when no pixel qualifies.
LossResult depth_normal_consensus(const DepthGrid& pred, const NormalGrid& normals,
                                  NormalConvention convention = NormalConvention::kCameraFacing);

struct LossInputs {
  const DepthGrid* pred_depth = nullptr;
  const DepthGrid* gt_depth = nullptr;
  const ProbGrid* pred_contours = nullptr;
  const ProbGrid* gt_contours = nullptr;
  const NormalGrid* pred_normals = nullptr;
  const NormalGrid* gt_normals = nullptr;
};

/// Unweighted per-term values alongside the weighted sum.
struct TotalLoss {
  LossResult total;
  double depth = 0.0;
  double contour = 0.0;
  double normals = 0.0;
  double depth_contour = 0.0;
  double depth_normal = 0.0;
};

/// lambda_d * depth + lambda_c * contour + lambda_n * normals + depth_contour + depth_normal.
/// All six inputs are required.
TotalLoss total_loss(const LossInputs& in, const LossWeights& weights,
                     const LossOptions& options = {});

}  // namespace depthedge::losses
