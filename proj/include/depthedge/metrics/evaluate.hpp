#pragma once

#include <string>
#include <vector>

#include "depthedge/imageio/dataset.hpp"
#include "depthedge/metrics/report.hpp"

namespace depthedge::metrics {

/// One image through the whole protocol:
///   clip prediction -> crop both -> accuracy/error metrics and directed depth error;
///   normalize the clipped, uncropped prediction -> Canny per preset -> DBE
///   accuracy and completeness against `gt_edges` (skipped when null).
EvalReport evaluate_pair(const DepthGrid& pred, const DepthGrid& gt, const EdgeMap* gt_edges,
                         const EvalConfig& cfg, const std::string& id = {});

/// DBE accuracy and completeness of `pred` (already clipped, uncropped) for
/// each preset, using cfg.theta, cfg.gauss_sigma and cfg.degenerate_ratio.
/// A constant or empty prediction has no edges, so its accuracy is undefined.
std::vector<DbeEntry> dbe_for_prediction(const DepthGrid& pred, const EdgeMap* gt_edges, const EvalConfig& cfg,
                                         const std::vector<edges::SigmaPreset>& presets);

/// Reads the entry's files and evaluates them.
EvalReport evaluate(const imageio::DatasetEntry& entry, const EvalConfig& cfg);

/// Mean of per-image reports (or valid-pixel weighted when cfg.pixel_weighted).
/// DBE and DDE averages use only the images where the value is defined.
/// The result does not depend on the order of `reports`' completion, only on
/// its element order. Throws EmptyDomainError for an empty list.
EvalReport aggregate(const std::vector<EvalReport>& reports, const EvalConfig& cfg,
                     const std::string& id = "aggregate");

}  // namespace depthedge::metrics
