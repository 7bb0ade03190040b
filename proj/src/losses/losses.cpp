#include "depthedge/losses/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "depthedge/core/diffops.hpp"

namespace depthedge::losses {
namespace {

double clamp_prob(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

bool inside_clamp(double p) { return p >= kProbEps && p <= 1.0 - kProbEps; }

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0)
    throw ParameterError(std::string(name) + " must be finite and >= 0");
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

Plane<std::uint8_t> shared_mask(const auto& a, const auto& b, const char* what) {
  require_same_shape(a, b, what);
  Plane<std::uint8_t> m = mask_and(a, b);
  if (popcount(m) == 0) throw EmptyDomainError(std::string(what) + ": no pixel valid in both inputs");
  return m;
}

}  // namespace

void LossWeights::validate() const {
  require_finite_nonneg(lambda_d, "lambda_d");
  require_finite_nonneg(lambda_c, "lambda_c");
  require_finite_nonneg(lambda_n, "lambda_n");
  require_finite_nonneg(mu, "mu");
}

void AttentionParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be > 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be > 0");
}

BerhuValue berhu(double x, double c) {
  if (!(c > 0.0)) throw ParameterError("BerHu switch point c must be > 0");
  const double ax = std::abs(x);
  if (ax <= c) return {ax, x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0)};
  return {(x * x + c * c) / (2.0 * c), x / c};
}

double attention_loss_pixel(double phat, bool p, const AttentionParams& params) {
  const double q = clamp_prob(phat);
  if (p) return -params.alpha * std::pow(params.beta, std::pow(1.0 - q, params.gamma)) * std::log(q);
  return -(1.0 - params.alpha) * std::pow(params.beta, std::pow(q, params.gamma)) * std::log(1.0 - q);
}

double attention_loss_pixel_grad(double phat, bool p, const AttentionParams& params) {
  if (!inside_clamp(phat)) return 0.0;
  const double q = phat;
  const double ln_beta = std::log(params.beta);
  if (p) {
    const double u = std::pow(1.0 - q, params.gamma);
    const double focus = std::pow(params.beta, u);
    const double du = -params.gamma * std::pow(1.0 - q, params.gamma - 1.0);
    return -params.alpha * (focus * ln_beta * du * std::log(q) + focus / q);
  }
  const double v = std::pow(q, params.gamma);
  const double focus = std::pow(params.beta, v);
  const double dv = params.gamma * std::pow(q, params.gamma - 1.0);
  return -(1.0 - params.alpha) * (focus * ln_beta * dv * std::log(1.0 - q) - focus / (1.0 - q));
}

LossResult depth_loss(const DepthGrid& pred, const DepthGrid& gt) {
  const Plane<std::uint8_t> mask = shared_mask(pred, gt, "depth_loss");
  const int w = pred.width();
  const int h = pred.height();

  ScalarField residual(w, h, 0.0, false);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (!(pred[i] > 0.0) || !(gt[i] > 0.0) || !std::isfinite(pred[i]) || !std::isfinite(gt[i]))
      throw DomainError("depth_loss: nonpositive or non-finite depth at a valid pixel");
    residual[i] = std::log(pred[i]) - std::log(gt[i]);
    residual.set_valid(i, true);
    max_abs = std::max(max_abs, std::abs(residual[i]));
  }
  const double n = static_cast<double>(popcount(mask));
  const double c = max_abs / 5.0;

  ScalarField d_residual(w, h, 0.0, true);
  double berhu_sum = 0.0;
  if (c > 0.0) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      const BerhuValue b = berhu(residual[i], c);
      berhu_sum += b.value;
      d_residual[i] = b.derivative / n;
    }
  }

  // grad(log pred) - grad(log gt) == grad(residual) by linearity.
  double grad_sum = 0.0;
  if (w >= 2 && h >= 2) {
    VecField2 g = gradient(residual);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g.valid(i)) continue;
      grad_sum += g[i][0] * g[i][0] + g[i][1] * g[i][1];
      g[i] = Vec2{2.0 * g[i][0] / n, 2.0 * g[i][1] / n};
    }
    const ScalarField back = gradient_adjoint(g);
    for (std::size_t i = 0; i < d_residual.size(); ++i) d_residual[i] += back[i];
  }

  LossResult r;
  r.value = berhu_sum / n + grad_sum / n;
  ScalarField d_pred(w, h, 0.0, true);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) d_pred[i] = d_residual[i] / pred[i];
  r.d_depth = std::move(d_pred);
  return r;
}

LossResult contour_loss(const ProbGrid& pred, const ProbGrid& gt, const AttentionParams& params,
                        AlphaMode mode) {
  params.validate();
  const Plane<std::uint8_t> mask = shared_mask(pred, gt, "contour_loss");
  std::size_t n = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (gt[i] != 0.0 && gt[i] != 1.0) throw DomainError("contour_loss: ground truth must be binary");
    ++n;
    if (gt[i] == 1.0) ++positives;
  }
  AttentionParams image_params = params;
  const double share = static_cast<double>(positives) / static_cast<double>(n);
  image_params.alpha = mode == AlphaMode::kContourFraction ? share : 1.0 - share;

  const double nd = static_cast<double>(n);
  ScalarField d_pred(pred.width(), pred.height(), 0.0, true);
  double sum = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const bool label = gt[i] == 1.0;
    sum += attention_loss_pixel(pred[i], label, image_params);
    d_pred[i] = attention_loss_pixel_grad(pred[i], label, image_params) / nd;
  }
  LossResult r;
  r.value = sum / nd;
  r.d_contours = std::move(d_pred);
  return r;
}

LossResult normals_loss(const NormalGrid& pred, const NormalGrid& gt) {
  const Plane<std::uint8_t> mask = shared_mask(pred, gt, "normals_loss");
  const double n = static_cast<double>(popcount(mask));
  VecField3 d_pred(pred.width(), pred.height(), Vec3{0.0, 0.0, 0.0}, true);
  double sum = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const Vec3& a = pred[i];
    const Vec3& b = gt[i];
    const double la = norm3(a);
    const double lb = norm3(b);
    if (!(la > 0.0) || !(lb > 0.0)) throw DomainError("normals_loss: zero-length normal at a valid pixel");
    const double cosine = dot3(a, b) / (la * lb);
    const double term = 1.0 - cosine;
    if (term <= 0.0) continue;
    sum += term;
    // d(1 - cos)/da = -(b / (|a||b|) - cos * a / |a|^2)
    Vec3 g;
    for (int k = 0; k < 3; ++k) g[k] = -(b[k] / (la * lb) - cosine * a[k] / (la * la)) / n;
    d_pred[i] = g;
  }
  LossResult r;
  r.value = sum / n;
  r.d_normals = std::move(d_pred);
  return r;
}

LossResult depth_contour_consensus(const DepthGrid& pred, const ProbGrid& contours, double mu,
                                   ContourNorm norm) {
  require_finite_nonneg(mu, "mu");
  require_same_shape(pred, contours, "depth_contour_consensus");
  const int w = pred.width();
  const int h = pred.height();
  const VecField2 grad = gradient(pred);
  const ScalarField lap = laplacian(pred);

  Plane<std::uint8_t> domain(w, h, 0);
  for (std::size_t i = 0; i < domain.size(); ++i)
    domain[i] = (lap.valid(i) && grad.valid(i) && contours.valid(i)) ? 1 : 0;
  const std::size_t count = popcount(domain);
  if (count == 0) throw EmptyDomainError("depth_contour_consensus: empty evaluation domain");
  const double n = static_cast<double>(count);

  double sharp_sum = 0.0;   // sum -log(C) |grad D|^2 |lap D|
  double smooth_sum = 0.0;  // sum -log(1 - C) exp(-|lap D|)
  double c_sum = 0.0;
  double c_sq_sum = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (!domain[i]) continue;
    const double c = clamp_prob(contours[i]);
    const double g2 = grad[i][0] * grad[i][0] + grad[i][1] * grad[i][1];
    const double a = std::abs(lap[i]);
    sharp_sum += -std::log(c) * g2 * a;
    smooth_sum += -std::log(1.0 - c) * std::exp(-a);
    c_sum += c;
    c_sq_sum += c * c;
  }
  const double c_mag = norm == ContourNorm::kMean ? c_sum / n : std::sqrt(c_sq_sum / n);

  LossResult r;
  r.value = sharp_sum / n + mu * (c_mag + smooth_sum / n);

  ScalarField d_c(w, h, 0.0, true);
  VecField2 grad_seed(w, h, Vec2{0.0, 0.0}, false);
  ScalarField lap_seed(w, h, 0.0, false);
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (!domain[i]) continue;
    const double raw = contours[i];
    const double c = clamp_prob(raw);
    const double g2 = grad[i][0] * grad[i][0] + grad[i][1] * grad[i][1];
    const double a = std::abs(lap[i]);
    const double e = std::exp(-a);

    if (inside_clamp(raw)) {
      const double d_mag = norm == ContourNorm::kMean ? 1.0 / n : (c_mag > 0.0 ? c / (n * c_mag) : 0.0);
      d_c[i] = -g2 * a / (c * n) + mu * (d_mag + e / ((1.0 - c) * n));
    }

    const double d_g2 = -std::log(c) * a / n;
    const double d_a = -std::log(c) * g2 / n + mu * std::log(1.0 - c) * e / n;
    grad_seed[i] = Vec2{2.0 * grad[i][0] * d_g2, 2.0 * grad[i][1] * d_g2};
    grad_seed.set_valid(i, true);
    const double sign = lap[i] > 0.0 ? 1.0 : (lap[i] < 0.0 ? -1.0 : 0.0);
    lap_seed[i] = sign * d_a;
    lap_seed.set_valid(i, true);
  }
  const ScalarField back_g = gradient_adjoint(grad_seed);
  const ScalarField back_l = laplacian_adjoint(lap_seed);
  ScalarField d_depth(w, h, 0.0, true);
  for (std::size_t i = 0; i < d_depth.size(); ++i) d_depth[i] = back_g[i] + back_l[i];

  r.d_depth = std::move(d_depth);
  r.d_contours = std::move(d_c);
  return r;
}

LossResult depth_normal_consensus(const DepthGrid& pred, const NormalGrid& normals,
                                  NormalConvention convention) {
  require_same_shape(pred, normals, "depth_normal_consensus");
  const int w = pred.width();
  const int h = pred.height();
  const double sign = convention == NormalConvention::kCameraFacing ? 1.0 : -1.0;
  const VecField2 grad = gradient(pred);

  Plane<std::uint8_t> domain(w, h, 0);
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (!grad.valid(i) || !normals.valid(i)) continue;
    const double lu = std::hypot(grad[i][0], grad[i][1]);
    const double ln = std::hypot(normals[i][0], normals[i][1]);
    domain[i] = (lu >= kDegenerateGradient && ln >= kDegenerateGradient) ? 1 : 0;
  }
  const std::size_t count = popcount(domain);

  LossResult r;
  r.d_depth = ScalarField(w, h, 0.0, true);
  r.d_normals = VecField3(w, h, Vec3{0.0, 0.0, 0.0}, true);
  if (count == 0) return r;
  const double m = static_cast<double>(count);

  VecField2 seed(w, h, Vec2{0.0, 0.0}, false);
  double sum = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (!domain[i]) continue;
    const Vec2 u = grad[i];
    const Vec2 nv{normals[i][0], normals[i][1]};
    const double lu = std::hypot(u[0], u[1]);
    const double ln = std::hypot(nv[0], nv[1]);
    const double cosine = (u[0] * nv[0] + u[1] * nv[1]) / (lu * ln);
    sum += 1.0 - sign * cosine;
    Vec2 du, dn;
    for (int k = 0; k < 2; ++k) {
      du[k] = -sign * (nv[k] / (lu * ln) - cosine * u[k] / (lu * lu)) / m;
      dn[k] = -sign * (u[k] / (lu * ln) - cosine * nv[k] / (ln * ln)) / m;
    }
    seed[i] = du;
    seed.set_valid(i, true);
    (*r.d_normals)[i] = Vec3{dn[0], dn[1], 0.0};
  }
  r.value = sum / m;
  r.d_depth = gradient_adjoint(seed);
  return r;
}

TotalLoss total_loss(const LossInputs& in, const LossWeights& weights, const LossOptions& options) {
  weights.validate();
  if (!in.pred_depth || !in.gt_depth || !in.pred_contours || !in.gt_contours || !in.pred_normals ||
      !in.gt_normals)
    throw ParameterError("total_loss needs all six inputs");

  const LossResult ld = depth_loss(*in.pred_depth, *in.gt_depth);
  const LossResult lc = contour_loss(*in.pred_contours, *in.gt_contours, options.attention, options.alpha_mode);
  const LossResult ln = normals_loss(*in.pred_normals, *in.gt_normals);
  const LossResult ldc =
      depth_contour_consensus(*in.pred_depth, *in.pred_contours, weights.mu, options.contour_norm);
  const LossResult ldn = depth_normal_consensus(*in.pred_depth, *in.pred_normals, options.convention);

  TotalLoss t;
  t.depth = ld.value;
  t.contour = lc.value;
  t.normals = ln.value;
  t.depth_contour = ldc.value;
  t.depth_normal = ldn.value;
  t.total.value = weights.lambda_d * ld.value + weights.lambda_c * lc.value +
                  weights.lambda_n * ln.value + ldc.value + ldn.value;

  const int w = in.pred_depth->width();
  const int h = in.pred_depth->height();
  ScalarField dd(w, h, 0.0, true);
  for (std::size_t i = 0; i < dd.size(); ++i)
    dd[i] = weights.lambda_d * (*ld.d_depth)[i] + (*ldc.d_depth)[i] + (*ldn.d_depth)[i];
  ScalarField dc(in.pred_contours->width(), in.pred_contours->height(), 0.0, true);
  for (std::size_t i = 0; i < dc.size(); ++i)
    dc[i] = weights.lambda_c * (*lc.d_contours)[i] + (*ldc.d_contours)[i];
  VecField3 dn(in.pred_normals->width(), in.pred_normals->height(), Vec3{0.0, 0.0, 0.0}, true);
  for (std::size_t i = 0; i < dn.size(); ++i)
    for (int k = 0; k < 3; ++k)
      dn[i][k] = weights.lambda_n * (*ln.d_normals)[i][k] + (*ldn.d_normals)[i][k];
  t.total.d_depth = std::move(dd);
  t.total.d_contours = std::move(dc);
  t.total.d_normals = std::move(dn);
  return t;
}

}  // namespace depthedge::losses
