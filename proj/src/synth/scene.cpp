#include "depthedge/synth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>

#include "depthedge/core/diffops.hpp"

namespace depthedge::synth {
namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }
int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::optional<double> sample(const Primitive& prim, int x, int y) {
  return std::visit(
      Overloaded{
          [&](const RectPrim& r) -> std::optional<double> {
            if (x < r.x0 || x >= r.x1 || y < r.y0 || y >= r.y1) return std::nullopt;
            return r.depth;
          },
          [&](const DiskPrim& d) -> std::optional<double> {
            const double dx = x - d.cx, dy = y - d.cy;
            if (dx * dx + dy * dy > d.radius * d.radius) return std::nullopt;
            return d.depth;
          },
          [&](const SlantedPrim& s) -> std::optional<double> {
            if (x < s.x0 || x >= s.x1 || y < s.y0 || y >= s.y1) return std::nullopt;
            return s.depth + s.a * (x - s.x0) + s.b * (y - s.y0);
          },
          [&](const HemispherePrim& h) -> std::optional<double> {
            const double dx = x - h.cx, dy = y - h.cy;
            const double rho2 = dx * dx + dy * dy, r2 = h.radius * h.radius;
            if (rho2 > r2) return std::nullopt;
            return h.base - h.height * std::sqrt(std::max(0.0, 1.0 - rho2 / r2));
          },
      },
      prim);
}

// Depth range over the footprint, for validation.
std::pair<double, double> depth_range(const Primitive& prim) {
  return std::visit(Overloaded{
                        [](const RectPrim& r) { return std::pair{r.depth, r.depth}; },
                        [](const DiskPrim& d) { return std::pair{d.depth, d.depth}; },
                        [](const SlantedPrim& s) {
                          const double c[4] = {s.depth, s.depth + s.a * (s.x1 - 1 - s.x0),
                                               s.depth + s.b * (s.y1 - 1 - s.y0),
                                               s.depth + s.a * (s.x1 - 1 - s.x0) + s.b * (s.y1 - 1 - s.y0)};
                          return std::pair{*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
                        },
                        [](const HemispherePrim& h) { return std::pair{h.base - h.height, h.base}; },
                    },
                    prim);
}

// Inclusive pixel bounding box [x0, x1] x [y0, y1].
struct Box {
  int x0, y0, x1, y1;
};

Box footprint(const Primitive& prim) {
  auto round_box = [](double cx, double cy, double r) {
    return Box{static_cast<int>(std::ceil(cx - r)), static_cast<int>(std::ceil(cy - r)),
               static_cast<int>(std::floor(cx + r)), static_cast<int>(std::floor(cy + r))};
  };
  return std::visit(Overloaded{
                        [](const RectPrim& r) { return Box{r.x0, r.y0, r.x1 - 1, r.y1 - 1}; },
                        [&](const DiskPrim& d) { return round_box(d.cx, d.cy, d.radius); },
                        [](const SlantedPrim& s) { return Box{s.x0, s.y0, s.x1 - 1, s.y1 - 1}; },
                        [&](const HemispherePrim& h) { return round_box(h.cx, h.cy, h.radius); },
                    },
                    prim);
}

Primitive translated(const Primitive& prim, int k) {
  return std::visit(Overloaded{
                        [&](RectPrim r) -> Primitive {
                          r.x0 += k;
                          r.x1 += k;
                          return r;
                        },
                        [&](DiskPrim d) -> Primitive {
                          d.cx += k;
                          return d;
                        },
                        [&](SlantedPrim s) -> Primitive {
                          s.x0 += k;
                          s.x1 += k;
                          return s;
                        },
                        [&](HemispherePrim h) -> Primitive {
                          h.cx += k;
                          return h;
                        },
                    },
                    prim);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double nominal_depth(const Primitive& p) {
  return std::visit(Overloaded{
                        [](const RectPrim& r) { return r.depth; },
                        [](const DiskPrim& d) { return d.depth; },
                        [](const SlantedPrim& s) { return s.depth; },
                        [](const HemispherePrim& h) { return h.base; },
                    },
                    p);
}

void SceneSpec::validate() const {
  if (width < 3 || height < 3) throw ParameterError("scene canvas must be at least 3x3");
  if (!finite_positive(background)) throw ParameterError("background depth must be positive");
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) throw ParameterError("noise sigma must be >= 0");
  if (noise.fatten < 0) throw ParameterError("fatten radius must be >= 0");
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const std::string name = "primitive " + std::to_string(i);
    const Primitive& p = primitives[i];
    if (const auto* r = std::get_if<RectPrim>(&p); r && (r->x0 >= r->x1 || r->y0 >= r->y1))
      throw ParameterError(name + ": empty rectangle");
    if (const auto* s = std::get_if<SlantedPrim>(&p); s && (s->x0 >= s->x1 || s->y0 >= s->y1))
      throw ParameterError(name + ": empty patch");
    if (const auto* s = std::get_if<SlantedPrim>(&p); s && (!std::isfinite(s->a) || !std::isfinite(s->b)))
      throw ParameterError(name + ": non-finite slope");
    if (const auto* d = std::get_if<DiskPrim>(&p); d && !finite_positive(d->radius))
      throw ParameterError(name + ": radius must be positive");
    if (const auto* h = std::get_if<HemispherePrim>(&p);
        h && (!finite_positive(h->radius) || !(h->height >= 0.0) || !std::isfinite(h->height)))
      throw ParameterError(name + ": bad cap radius or height");
    const Box b = footprint(p);
    if (b.x0 < 0 || b.y0 < 0 || b.x1 >= width || b.y1 >= height)
      throw ParameterError(name + ": outside the canvas");
    const auto [lo, hi] = depth_range(p);
    if (!finite_positive(lo) || !std::isfinite(hi)) throw ParameterError(name + ": depth must be positive");
    if (!(hi < background)) throw ParameterError(name + ": must lie in front of the background");
  }
}

double gap_threshold(const SceneSpec& spec) {
  std::set<double> depths{spec.background};
  for (const Primitive& p : spec.primitives) depths.insert(nominal_depth(p));
  double gap = std::numeric_limits<double>::infinity();
  for (auto it = depths.begin(); std::next(it) != depths.end(); ++it) gap = std::min(gap, *std::next(it) - *it);
  return 0.5 * gap;
}

EdgeMap step_contours(const DepthGrid& depth, double threshold) {
  EdgeMap out(depth.width(), depth.height(), 0);
  static constexpr int kDx[4] = {1, -1, 0, 0};
  static constexpr int kDy[4] = {0, 0, 1, -1};
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x) {
      if (!depth.valid(x, y)) continue;
      for (int k = 0; k < 4; ++k) {
        const int qx = x + kDx[k], qy = y + kDy[k];
        if (!depth.contains(qx, qy) || !depth.valid(qx, qy)) continue;
        if (depth(qx, qy) - depth(x, y) > threshold) {
          out(x, y) = 1;
          break;
        }
      }
    }
  return out;
}

SceneTruth render(const SceneSpec& spec) {
  spec.validate();
  const int w = spec.width, h = spec.height;
  SceneTruth t{spec, DepthGrid(w, h, spec.background, true), NormalGrid(w, h, Vec3{0.0, 0.0, -1.0}, false),
               EdgeMap(w, h, 0), Plane<int>(w, h, 0), gap_threshold(spec)};

  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    const Box b = footprint(spec.primitives[i]);
    for (int y = b.y0; y <= b.y1; ++y)
      for (int x = b.x0; x <= b.x1; ++x) {
        const std::optional<double> d = sample(spec.primitives[i], x, y);
        if (d && *d <= t.depth(x, y)) {
          t.depth(x, y) = *d;
          t.surface(x, y) = static_cast<int>(i) + 1;
        }
      }
  }

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int s = t.surface(x, y);
      if (x + 1 < w && t.surface(x + 1, y) == s && std::abs(t.depth(x + 1, y) - t.depth(x, y)) > t.gap_threshold)
        throw DomainError("surface " + std::to_string(s) + " has a depth step above the contour threshold at (" +
                          std::to_string(x) + ", " + std::to_string(y) + ")");
      if (y + 1 < h && t.surface(x, y + 1) == s && std::abs(t.depth(x, y + 1) - t.depth(x, y)) > t.gap_threshold)
        throw DomainError("surface " + std::to_string(s) + " has a depth step above the contour threshold at (" +
                          std::to_string(x) + ", " + std::to_string(y) + ")");
    }

  t.contours = step_contours(t.depth, t.gap_threshold);

  // Normals only where the finite-difference stencil stays on one surface.
  // Caps use the stencil's own differences of the analytic depth, so the
  // depth/normal consensus of a clean render vanishes.
  const VecField2 g = gradient(t.depth);
  for (int y = 0; y < h; ++y) {
    const int y0 = y == 0 ? 0 : y - 1, y1 = y == h - 1 ? h - 1 : y + 1;
    for (int x = 0; x < w; ++x) {
      const int x0 = x == 0 ? 0 : x - 1, x1 = x == w - 1 ? w - 1 : x + 1;
      const int s = t.surface(x, y);
      if (t.surface(x0, y) != s || t.surface(x1, y) != s || t.surface(x, y0) != s || t.surface(x, y1) != s)
        continue;
      Vec3 n{0.0, 0.0, -1.0};
      if (s > 0) {
        const Primitive& p = spec.primitives[static_cast<std::size_t>(s - 1)];
        if (const auto* sl = std::get_if<SlantedPrim>(&p)) {
          n = {sl->a, sl->b, -1.0};
        } else if (std::holds_alternative<HemispherePrim>(p)) {
          n = {g(x, y)[0], g(x, y)[1], -1.0};
        }
      }
      const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
      t.normals(x, y) = {n[0] / len, n[1] / len, n[2] / len};
      t.normals.set_valid(x, y, true);
    }
  }
  return t;
}

DepthGrid perturb(const SceneTruth& truth, const NoiseSpec& noise, std::uint64_t seed) {
  if (!(noise.sigma >= 0.0) || noise.fatten < 0) throw ParameterError("noise parameters must be >= 0");
  DepthGrid out = truth.depth;
  const int w = out.width(), h = out.height(), r = noise.fatten;

  if (r > 0) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!truth.contours(x, y)) continue;
        const double near = truth.depth(x, y);
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy > r * r || !out.contains(x + dx, y + dy)) continue;
            double& v = out(x + dx, y + dy);
            v = std::min(v, near);
          }
      }
  }

  if (noise.sigma > 0.0) {
    // Box-Muller on a fixed generator so results do not depend on the
    // standard library's distribution implementation.
    std::mt19937_64 rng(seed);
    std::size_t i = 0;
    const std::size_t n = out.size();
    while (i < n) {
      const double u1 = 1.0 - uniform01(rng);  // (0, 1]
      const double u2 = uniform01(rng);
      const double m = std::sqrt(-2.0 * std::log(u1));
      const double z[2] = {m * std::cos(2.0 * std::numbers::pi * u2), m * std::sin(2.0 * std::numbers::pi * u2)};
      for (int k = 0; k < 2 && i < n; ++k, ++i)
        if (out.valid(i)) out[i] = std::max(1e-3, out[i] + noise.sigma * z[k]);
    }
  }
  return out;
}

int right_margin(const SceneSpec& spec) {
  int right = -1;
  for (const Primitive& p : spec.primitives) right = std::max(right, footprint(p).x1);
  return spec.width - 1 - right;
}

SceneTruth shift_edges(const SceneTruth& truth, int k) {
  const int margin = right_margin(truth.spec);
  if (k < 0 || k > margin)
    throw ParameterError("shift " + std::to_string(k) + " outside [0, " + std::to_string(margin) + "]");
  if (k == 0) return truth;
  SceneSpec moved = truth.spec;
  for (Primitive& p : moved.primitives) p = translated(p, k);
  return render(moved);
}

ProbGrid contour_probabilities(const EdgeMap& contours) {
  ProbGrid p(contours.width(), contours.height(), 0.0, true);
  for (std::size_t i = 0; i < contours.size(); ++i) p[i] = contours[i] ? 1.0 : 0.0;
  return p;
}

SceneSpec random_scene(const RandomSceneOptions& o, std::uint64_t seed) {
  if (o.min_primitives < 0 || o.max_primitives < o.min_primitives)
    throw ParameterError("bad primitive count range");
  if (!(o.depth_min > 0.0) || !(o.depth_max > o.depth_min) || !(o.min_gap > 0.0))
    throw ParameterError("bad depth range");
  if (!(o.rects || o.disks || o.slanted || o.hemispheres)) throw ParameterError("no primitive kind enabled");
  const int inner_w = o.width - 2 * o.margin, inner_h = o.height - 2 * o.margin;
  if (inner_w < 6 || inner_h < 6) throw ParameterError("canvas too small for the margin");

  std::mt19937_64 rng(seed);
  const int levels = static_cast<int>(std::floor((o.depth_max - o.depth_min) / o.min_gap)) + 1;
  const int n = uniform_int(rng, o.min_primitives, o.max_primitives);
  if (n + 1 > levels) throw ParameterError("depth range holds too few lattice levels for the primitives");

  // n + 1 distinct lattice levels; the farthest becomes the background.
  std::vector<int> pool(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < n + 1; ++i) std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(uniform_int(rng, i, levels - 1))]);
  std::vector<int> chosen(pool.begin(), pool.begin() + n + 1);
  const int far = *std::max_element(chosen.begin(), chosen.end());
  chosen.erase(std::find(chosen.begin(), chosen.end(), far));

  SceneSpec spec;
  spec.width = o.width;
  spec.height = o.height;
  spec.background = o.depth_min + far * o.min_gap;
  spec.seed = seed;

  std::vector<int> kinds;
  if (o.rects) kinds.push_back(0);
  if (o.disks) kinds.push_back(1);
  if (o.slanted) kinds.push_back(2);
  if (o.hemispheres) kinds.push_back(3);
  const double vary = 0.2 * o.min_gap;
  const int min_side = std::max(3, std::min(inner_w, inner_h) / 8);
  const int max_side = std::max(min_side, std::min(inner_w, inner_h) / 3);

  for (int i = 0; i < n; ++i) {
    const double d = o.depth_min + chosen[static_cast<std::size_t>(i)] * o.min_gap;
    const int kind = kinds[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(kinds.size()) - 1))];
    if (kind == 0 || kind == 2) {
      const int sw = uniform_int(rng, min_side, max_side), sh = uniform_int(rng, min_side, max_side);
      const int x0 = o.margin + uniform_int(rng, 0, inner_w - sw), y0 = o.margin + uniform_int(rng, 0, inner_h - sh);
      if (kind == 0) {
        spec.primitives.push_back(RectPrim{x0, y0, x0 + sw, y0 + sh, d});
      } else {
        // total variation across the patch stays within `vary`, centred on d
        const double a = uniform(rng, -1.0, 1.0) * 0.5 * vary / sw;
        const double b = uniform(rng, -1.0, 1.0) * 0.5 * vary / sh;
        const double anchor = d - 0.5 * (a * (sw - 1) + b * (sh - 1));
        spec.primitives.push_back(SlantedPrim{x0, y0, x0 + sw, y0 + sh, anchor, a, b});
      }
    } else {
      const double r = uniform(rng, 0.5 * min_side, 0.5 * max_side);
      const double cx = uniform(rng, o.margin + r, o.margin + inner_w - 1 - r);
      const double cy = uniform(rng, o.margin + r, o.margin + inner_h - 1 - r);
      if (kind == 1)
        spec.primitives.push_back(DiskPrim{cx, cy, r, d});
      else
        spec.primitives.push_back(HemispherePrim{cx, cy, r, d, uniform(rng, 0.25, 1.0) * vary});
    }
  }
  return spec;
}

nlohmann::json scene_to_json(const SceneSpec& spec) {
  nlohmann::json prims = nlohmann::json::array();
  for (const Primitive& p : spec.primitives) {
    prims.push_back(std::visit(
        Overloaded{
            [](const RectPrim& r) {
              return nlohmann::json{{"type", "rect"}, {"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}, {"depth", r.depth}};
            },
            [](const DiskPrim& d) {
              return nlohmann::json{{"type", "disk"}, {"cx", d.cx}, {"cy", d.cy}, {"radius", d.radius}, {"depth", d.depth}};
            },
            [](const SlantedPrim& s) {
              return nlohmann::json{{"type", "slanted"}, {"x0", s.x0}, {"y0", s.y0}, {"x1", s.x1},
                                    {"y1", s.y1},        {"depth", s.depth}, {"a", s.a}, {"b", s.b}};
            },
            [](const HemispherePrim& h) {
              return nlohmann::json{{"type", "hemisphere"}, {"cx", h.cx}, {"cy", h.cy}, {"radius", h.radius},
                                    {"base", h.base},       {"height", h.height}};
            },
        },
        p));
  }
  return {{"width", spec.width},
          {"height", spec.height},
          {"background", spec.background},
          {"primitives", prims},
          {"noise", {{"sigma", spec.noise.sigma}, {"fatten", spec.noise.fatten}}},
          {"seed", spec.seed}};
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  auto field = [](const nlohmann::json& obj, const char* key) -> const nlohmann::json& {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParameterError(std::string("scene: missing field '") + key + "'");
    return *it;
  };
  try {
    SceneSpec s;
    s.width = field(j, "width").get<int>();
    s.height = field(j, "height").get<int>();
    s.background = field(j, "background").get<double>();
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("noise")) {
      s.noise.sigma = j["noise"].value("sigma", 0.0);
      s.noise.fatten = j["noise"].value("fatten", 0);
    }
    for (const nlohmann::json& p : j.value("primitives", nlohmann::json::array())) {
      const std::string type = field(p, "type").get<std::string>();
      if (type == "rect") {
        s.primitives.push_back(RectPrim{field(p, "x0").get<int>(), field(p, "y0").get<int>(), field(p, "x1").get<int>(),
                                        field(p, "y1").get<int>(), field(p, "depth").get<double>()});
      } else if (type == "disk") {
        s.primitives.push_back(DiskPrim{field(p, "cx").get<double>(), field(p, "cy").get<double>(),
                                        field(p, "radius").get<double>(), field(p, "depth").get<double>()});
      } else if (type == "slanted") {
        s.primitives.push_back(SlantedPrim{field(p, "x0").get<int>(), field(p, "y0").get<int>(),
                                           field(p, "x1").get<int>(), field(p, "y1").get<int>(),
                                           field(p, "depth").get<double>(), p.value("a", 0.0), p.value("b", 0.0)});
      } else if (type == "hemisphere") {
        s.primitives.push_back(HemispherePrim{field(p, "cx").get<double>(), field(p, "cy").get<double>(),
                                              field(p, "radius").get<double>(), field(p, "base").get<double>(),
                                              field(p, "height").get<double>()});
      } else {
        throw ParameterError("scene: unknown primitive type '" + type + "'");
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("scene: ") + e.what());
  }
}

}  // namespace depthedge::synth
