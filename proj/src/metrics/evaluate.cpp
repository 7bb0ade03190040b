#include "depthedge/metrics/evaluate.hpp"

#include <cmath>

#include "depthedge/edges/edges.hpp"
#include "depthedge/imageio/pnm.hpp"

namespace depthedge::metrics {

void EvalConfig::validate() const {
  if (clip) clip->validate();
  if (!(theta > 0.0)) throw ParameterError("theta must be > 0");
  if (!(gauss_sigma >= 0.0)) throw ParameterError("gauss_sigma must be >= 0");
  if (!(d_ref > 0.0)) throw ParameterError("d_ref must be > 0");
  if (!(degenerate_ratio >= 0.0 && degenerate_ratio <= 1.0))
    throw ParameterError("degenerate_ratio must lie in [0, 1]");
  for (const edges::SigmaPreset& p : presets)
    edges::CannyParams{p.sigma_low, p.sigma_high, gauss_sigma}.validate();
}

const DbeEntry* EvalReport::find_dbe(const std::string& label) const {
  for (const DbeEntry& e : dbe)
    if (e.label == label) return &e;
  return nullptr;
}

std::vector<DbeEntry> dbe_for_prediction(const DepthGrid& pred, const EdgeMap* gt_edges, const EvalConfig& cfg,
                                         const std::vector<edges::SigmaPreset>& presets) {
  if (gt_edges) require_same_shape(pred, *gt_edges, "dbe (edge annotation)");
  std::optional<ScalarField> normalized;
  try {
    normalized = edges::normalize_depth(pred);
  } catch (const DegenerateRangeError&) {
    // flat prediction: no edges at any threshold
  } catch (const EmptyDomainError&) {
  }
  const std::size_t gt_count = gt_edges ? popcount(*gt_edges) : 0;

  std::vector<DbeEntry> out;
  out.reserve(presets.size());
  for (const edges::SigmaPreset& preset : presets) {
    DbeEntry e;
    e.label = preset.name;
    e.sigma_low = preset.sigma_low;
    e.sigma_high = preset.sigma_high;
    e.gt_edge_pixels = gt_count;
    e.images = 1;
    EdgeMap detected(pred.width(), pred.height(), 0);
    if (normalized)
      detected = edges::canny(*normalized, {preset.sigma_low, preset.sigma_high, cfg.gauss_sigma});
    e.pred_edge_pixels = popcount(detected);

    if (gt_edges) {
      if (e.pred_edge_pixels > 0) {
        const edges::ChamferResult acc = edges::truncated_chamfer(detected, *gt_edges, cfg.theta);
        e.acc = acc.value;
        e.acc_truncated_fraction = acc.truncated_fraction();
        e.acc_degenerate = e.acc_truncated_fraction > cfg.degenerate_ratio;
      }
      if (gt_count > 0) {
        const edges::ChamferResult comp = edges::truncated_chamfer(*gt_edges, detected, cfg.theta);
        e.comp = comp.value;
        e.comp_truncated_fraction = comp.truncated_fraction();
        e.comp_degenerate = e.comp_truncated_fraction > cfg.degenerate_ratio;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

EvalReport evaluate_pair(const DepthGrid& pred, const DepthGrid& gt, const EdgeMap* gt_edges,
                         const EvalConfig& cfg, const std::string& id) {
  cfg.validate();
  require_same_shape(pred, gt, "evaluate");
  if (gt_edges) require_same_shape(pred, *gt_edges, "evaluate (edge annotation)");

  EvalReport r;
  r.id = id;
  r.config = cfg;

  const DepthGrid clipped = cfg.clip ? clip_depth(pred, *cfg.clip) : pred;
  const std::optional<Rect> rect = cfg.crop.resolve(pred.width(), pred.height());
  const DepthGrid pred_eval = rect ? crop(clipped, *rect) : clipped;
  const DepthGrid gt_eval = rect ? crop(gt, *rect) : gt;

  const StandardMetrics m = standard_metrics(pred_eval, gt_eval);
  r.delta1 = m.delta[0];
  r.delta2 = m.delta[1];
  r.delta3 = m.delta[2];
  r.rel = m.errors.rel;
  r.log10 = m.errors.log10;
  r.rmse_lin = m.errors.rmse_lin;
  r.rmse_log = m.errors.rmse_log;
  r.valid_pixels = m.valid_pixels;

  const edges::DdeResult d = edges::dde(pred_eval, gt_eval, cfg.d_ref);
  r.dde_0 = d.eps0;
  r.dde_minus = d.eps_minus;
  r.dde_plus = d.eps_plus;

  r.dbe = dbe_for_prediction(clipped, gt_edges, cfg, cfg.presets);
  return r;
}

EvalReport evaluate(const imageio::DatasetEntry& entry, const EvalConfig& cfg) {
  const DepthGrid pred = imageio::read_depth(entry.pred_depth);
  const DepthGrid gt = imageio::read_depth(entry.gt_depth);
  std::optional<EdgeMap> edges;
  if (entry.gt_contours) edges = imageio::read_mask(*entry.gt_contours);
  return evaluate_pair(pred, gt, edges ? &*edges : nullptr, cfg, entry.id);
}

namespace {

// Weighted running mean that ignores missing values.
struct Mean {
  double sum = 0.0;
  double weight = 0.0;
  void add(double v, double w) {
    sum += w * v;
    weight += w;
  }
  void add(const std::optional<double>& v, double w) {
    if (v) add(*v, w);
  }
  std::optional<double> value() const {
    if (weight <= 0.0) return std::nullopt;
    return sum / weight;
  }
};

}  // namespace

EvalReport aggregate(const std::vector<EvalReport>& reports, const EvalConfig& cfg, const std::string& id) {
  if (reports.empty()) throw EmptyDomainError("aggregate over zero reports");
  EvalReport out;
  out.id = id;
  out.config = cfg;
  out.images = reports.size();

  Mean d1, d2, d3, rel, log10, rmse_lin_sq, rmse_log_sq, rmse_lin, rmse_log, e0, em, ep;
  for (const EvalReport& r : reports) {
    const double w = cfg.pixel_weighted ? static_cast<double>(r.valid_pixels) : 1.0;
    d1.add(r.delta1, w);
    d2.add(r.delta2, w);
    d3.add(r.delta3, w);
    rel.add(r.rel, w);
    log10.add(r.log10, w);
    rmse_lin.add(r.rmse_lin, w);
    rmse_log.add(r.rmse_log, w);
    rmse_lin_sq.add(r.rmse_lin * r.rmse_lin, w);
    rmse_log_sq.add(r.rmse_log * r.rmse_log, w);
    e0.add(r.dde_0, w);
    em.add(r.dde_minus, w);
    ep.add(r.dde_plus, w);
    out.valid_pixels += r.valid_pixels;
  }
  out.delta1 = *d1.value();
  out.delta2 = *d2.value();
  out.delta3 = *d3.value();
  out.rel = *rel.value();
  out.log10 = *log10.value();
  if (cfg.pixel_weighted) {
    // pooled over all pixels
    out.rmse_lin = std::sqrt(*rmse_lin_sq.value());
    out.rmse_log = std::sqrt(*rmse_log_sq.value());
  } else {
    out.rmse_lin = *rmse_lin.value();
    out.rmse_log = *rmse_log.value();
  }
  out.dde_0 = e0.value();
  out.dde_minus = em.value();
  out.dde_plus = ep.value();

  for (const edges::SigmaPreset& preset : cfg.presets) {
    DbeEntry e;
    e.label = preset.name;
    e.sigma_low = preset.sigma_low;
    e.sigma_high = preset.sigma_high;
    Mean acc, comp, acc_trunc, comp_trunc;
    for (const EvalReport& r : reports) {
      const DbeEntry* src = r.find_dbe(preset.name);
      if (!src) continue;
      e.pred_edge_pixels += src->pred_edge_pixels;
      e.gt_edge_pixels += src->gt_edge_pixels;
      if (src->acc) {
        acc.add(*src->acc, 1.0);
        acc_trunc.add(src->acc_truncated_fraction, 1.0);
        ++e.images;
      }
      if (src->comp) {
        comp.add(*src->comp, 1.0);
        comp_trunc.add(src->comp_truncated_fraction, 1.0);
      }
    }
    e.acc = acc.value();
    e.comp = comp.value();
    e.acc_truncated_fraction = acc_trunc.value().value_or(0.0);
    e.comp_truncated_fraction = comp_trunc.value().value_or(0.0);
    e.acc_degenerate = e.acc && e.acc_truncated_fraction > cfg.degenerate_ratio;
    e.comp_degenerate = e.comp && e.comp_truncated_fraction > cfg.degenerate_ratio;
    out.dbe.push_back(std::move(e));
  }
  return out;
}

}  // namespace depthedge::metrics
