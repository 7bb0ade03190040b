#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "depthedge/core/grid.hpp"
#include "json.hpp"

namespace depthedge::synth {

// Orthographic scenes. Pixel (x, y) samples the scene at its centre (x, y).
// Depths are metres, lengths pixels.

/// Fronto-parallel rectangle covering [x0, x1) x [y0, y1).
struct RectPrim {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double depth = 1.0;
};

/// Fronto-parallel disk covering (x - cx)^2 + (y - cy)^2 <= r^2.
struct DiskPrim {
  double cx = 0.0, cy = 0.0, radius = 1.0;
  double depth = 1.0;
};

/// Planar patch over [x0, x1) x [y0, y1) with depth + a (x - x0) + b (y - y0).
struct SlantedPrim {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double depth = 1.0;
  double a = 0.0, b = 0.0;  // m/px
};

/// Spherical cap bulging toward the camera:
/// base - height * sqrt(1 - rho^2 / r^2) for rho <= r.
struct HemispherePrim {
  double cx = 0.0, cy = 0.0, radius = 1.0;
  double base = 1.0;
  double height = 0.1;
};

using Primitive = std::variant<RectPrim, DiskPrim, SlantedPrim, HemispherePrim>;

struct NoiseSpec {
  double sigma = 0.0;  // gaussian depth noise, m
  int fatten = 0;      // near-depth bleed radius across contours, px
};

struct SceneSpec {
  int width = 64;
  int height = 64;
  double background = 5.0;
  std::vector<Primitive> primitives;  // later entries win depth ties
  NoiseSpec noise{};
  std::uint64_t seed = 0;

  /// Throws ParameterError on a violated invariant.
  void validate() const;
};

struct SceneTruth {
  SceneSpec spec;
  DepthGrid depth;
  NormalGrid normals;    // invalid where the gradient stencil crosses surfaces
  EdgeMap contours;      // near side of every step larger than `gap_threshold`
  Plane<int> surface;    // 0 = background, i + 1 = primitives[i]
  double gap_threshold;  // half the smallest gap between nominal surface depths
};

/// Nominal depth of a primitive (its constant, anchor or base depth).
double nominal_depth(const Primitive& p);

/// Half the smallest positive gap between the distinct nominal depths of the
/// background and all primitives; +inf when there is only one.
double gap_threshold(const SceneSpec& spec);

/// Throws ParameterError for an invalid spec and DomainError when a single
/// surface has a 4-neighbour depth step above the gap threshold.
SceneTruth render(const SceneSpec& spec);

/// Brute-force contour labelling: p is set when some 4-neighbour q has
/// depth(q) - depth(p) > threshold.
EdgeMap step_contours(const DepthGrid& depth, double threshold);

/// Prediction-like depth: near-depth bleed within noise.fatten pixels of a
/// contour, then seeded gaussian noise (values kept >= 1 mm).
DepthGrid perturb(const SceneTruth& truth, const NoiseSpec& noise, std::uint64_t seed);

/// Free columns to the right of the rightmost primitive pixel.
int right_margin(const SceneSpec& spec);

/// Re-renders with every primitive moved k pixels to the right.
/// Throws ParameterError unless 0 <= k <= right_margin.
SceneTruth shift_edges(const SceneTruth& truth, int k);

/// Contour map as a ground-truth probability grid (all pixels valid).
ProbGrid contour_probabilities(const EdgeMap& contours);

struct RandomSceneOptions {
  int width = 64;
  int height = 64;
  int min_primitives = 1;
  int max_primitives = 4;
  double depth_min = 1.0;  // nearest nominal depth
  double depth_max = 6.0;  // farthest nominal depth (background upper bound)
  double min_gap = 0.4;    // spacing of the nominal depth lattice
  int margin = 2;          // keep primitives this far from the canvas border
  bool rects = true, disks = true, slanted = true, hemispheres = true;
};

/// Seeded random scene. Nominal depths are drawn from a lattice with spacing
/// min_gap; slanted patches and caps vary by at most a fifth of it, so every
/// surface boundary is a step above the contour threshold.
SceneSpec random_scene(const RandomSceneOptions& options, std::uint64_t seed);

nlohmann::json scene_to_json(const SceneSpec& spec);
/// Throws ParameterError on unknown primitive types or missing fields.
SceneSpec scene_from_json(const nlohmann::json& j);

}  // namespace depthedge::synth
