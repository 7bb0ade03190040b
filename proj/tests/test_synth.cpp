#include <cmath>

#include "depthedge/edges/edges.hpp"
#include "depthedge/losses/losses.hpp"
#include "depthedge/synth/scene.hpp"
#include "doctest.h"

using namespace depthedge;
using namespace depthedge::synth;

namespace {

SceneSpec rect_scene() {
  SceneSpec s;
  s.width = 40;
  s.height = 30;
  s.background = 2.0;
  s.primitives.push_back(RectPrim{15, 10, 25, 20, 1.0});
  return s;
}

}  // namespace

TEST_CASE("background only") {
  SceneSpec s;
  s.width = 16;
  s.height = 12;
  s.background = 3.0;
  const SceneTruth t = render(s);
  CHECK(popcount(t.contours) == 0);
  for (std::size_t i = 0; i < t.depth.size(); ++i) {
    CHECK(t.depth[i] == 3.0);
    CHECK(t.normals.valid(i));
    CHECK(t.normals[i] == Vec3{0.0, 0.0, -1.0});
  }
  CHECK(std::isinf(t.gap_threshold));
}

TEST_CASE("rectangle contour is its one-pixel boundary ring") {
  const SceneTruth t = render(rect_scene());
  CHECK(t.gap_threshold == 0.5);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 40; ++x) {
      const bool inside = x >= 15 && x < 25 && y >= 10 && y < 20;
      const bool ring = inside && (x == 15 || x == 24 || y == 10 || y == 19);
      CHECK(t.contours(x, y) == (ring ? 1 : 0));
    }
  CHECK(t.contours == step_contours(t.depth, t.gap_threshold));
  // normals are dropped where the stencil straddles the step
  CHECK_FALSE(t.normals.valid(15, 15));
  CHECK_FALSE(t.normals.valid(14, 15));
  CHECK(t.normals.valid(16, 15));
  CHECK(t.normals.valid(13, 15));
}

TEST_CASE("slanted patch normals") {
  SceneSpec s;
  s.width = 30;
  s.height = 30;
  s.background = 5.0;
  const double a = 0.05;
  s.primitives.push_back(SlantedPrim{5, 5, 25, 25, 2.0, a, 0.0});
  const SceneTruth t = render(s);
  const double len = std::sqrt(1 + a * a);
  for (int y = 6; y < 24; ++y)
    for (int x = 6; x < 24; ++x) {
      REQUIRE(t.normals.valid(x, y));
      CHECK(t.normals(x, y)[0] == doctest::Approx(a / len).epsilon(1e-15));
      CHECK(t.normals(x, y)[1] == 0.0);
      CHECK(t.normals(x, y)[2] == doctest::Approx(-1 / len).epsilon(1e-15));
    }
  CHECK(t.depth(7, 9) == doctest::Approx(2.0 + 2 * a));
}

TEST_CASE("random scenes satisfy the truth invariants") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CAPTURE(seed);
    const SceneSpec spec = random_scene({}, seed);
    const SceneTruth t = render(spec);
    CHECK_NOTHROW(validate_unit(t.normals));
    CHECK_NOTHROW(validate(t.depth));
    CHECK(t.contours == step_contours(t.depth, t.gap_threshold));
    CHECK(losses::depth_normal_consensus(t.depth, t.normals).value <= 1e-9);
    CHECK(render(spec).depth == t.depth);
    CHECK(random_scene({}, seed).primitives.size() == spec.primitives.size());
  }
}

TEST_CASE("perturb") {
  const SceneTruth t = render(rect_scene());
  CHECK(perturb(t, {}, 1) == t.depth);
  const DepthGrid a = perturb(t, {0.01, 0}, 5), b = perturb(t, {0.01, 0}, 5), c = perturb(t, {0.01, 0}, 6);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK_THROWS_AS(perturb(t, {-1.0, 0}, 0), ParameterError);

  const DepthGrid fat = perturb(t, {0.0, 2}, 0);
  CHECK(fat(13, 15) == 1.0);  // far pixel two columns out takes the near depth
  CHECK(fat(12, 15) == 2.0);
  const EdgeMap detected = edges::canny(edges::normalize_depth(fat), {0.1, 0.2, 1.0});
  CHECK(edges::dbe_accuracy(detected, t.contours) <= 2.5);
}

TEST_CASE("shift_edges") {
  const SceneTruth t = render(rect_scene());
  CHECK(right_margin(t.spec) == 15);
  CHECK(shift_edges(t, 0).depth == t.depth);
  const SceneTruth m = shift_edges(t, 3);
  CHECK(m.depth(18, 12) == 1.0);
  CHECK(m.depth(17, 12) == 2.0);
  CHECK_THROWS_AS(shift_edges(t, 16), ParameterError);
  CHECK_THROWS_AS(shift_edges(t, -1), ParameterError);

  SceneSpec band;
  band.width = 50;
  band.height = 20;
  band.background = 4.0;
  band.primitives.push_back(RectPrim{10, 0, 30, 20, 2.0});
  const SceneTruth bt = render(band);
  CHECK(edges::dbe_accuracy(shift_edges(bt, 3).contours, bt.contours) == 3.0);
}

TEST_CASE("spec validation") {
  SceneSpec s = rect_scene();
  s.primitives.push_back(RectPrim{0, 0, 5, 5, 2.5});
  CHECK_THROWS_AS(render(s), ParameterError);  // behind the background
  s = rect_scene();
  s.primitives.push_back(DiskPrim{38.5, 10, 3, 1.5});
  CHECK_THROWS_AS(render(s), ParameterError);  // leaves the canvas
  s = rect_scene();
  s.primitives.push_back(SlantedPrim{0, 0, 4, 10, 0.2, 0.45, 0.0});
  CHECK_THROWS_AS(render(s), DomainError);  // 0.45 m steps within one surface, threshold 0.4 m
  s = rect_scene();
  s.noise.fatten = -1;
  CHECK_THROWS_AS(render(s), ParameterError);
}

TEST_CASE("scene JSON round trip") {
  SceneSpec s = rect_scene();
  s.primitives.push_back(DiskPrim{5.5, 5.5, 3.0, 1.5});
  s.primitives.push_back(SlantedPrim{28, 2, 36, 8, 0.8, 0.01, -0.01});
  s.primitives.push_back(HemispherePrim{30, 22, 4, 1.2, 0.1});
  s.noise = {0.02, 1};
  s.seed = 77;
  const SceneSpec back = scene_from_json(scene_to_json(s));
  CHECK(scene_to_json(back) == scene_to_json(s));
  CHECK(render(back).depth == render(s).depth);
  CHECK_THROWS_AS(scene_from_json(nlohmann::json{{"width", 3}}), ParameterError);
  nlohmann::json bad = scene_to_json(s);
  bad["primitives"][0]["type"] = "cube";
  CHECK_THROWS_AS(scene_from_json(bad), ParameterError);
}
