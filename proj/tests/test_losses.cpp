#include <cmath>
#include <random>

#include "depthedge/losses/losses.hpp"
#include "depthedge/synth/scene.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace depthedge;
using namespace depthedge::losses;

TEST_CASE("berhu branches") {
  CHECK(berhu(0.5, 1.0).value == 0.5);
  CHECK(berhu(-0.5, 1.0).derivative == -1.0);
  CHECK(berhu(2.0, 1.0).value == 2.5);
  CHECK(berhu(2.0, 1.0).derivative == 2.0);
  CHECK(berhu(1.0, 1.0).value == 1.0);  // continuous at the switch point
  CHECK(berhu(0.0, 1.0).derivative == 0.0);
  CHECK_THROWS_AS(berhu(1.0, 0.0), ParameterError);
}

TEST_CASE("attention loss per pixel") {
  const AttentionParams p{0.5, 4.0, 0.5};
  const double q = 0.25;
  CHECK(attention_loss_pixel(q, true, p) == doctest::Approx(-0.5 * std::pow(4.0, std::sqrt(0.75)) * std::log(0.25)));
  CHECK(attention_loss_pixel(q, false, p) == doctest::Approx(-0.5 * std::pow(4.0, std::sqrt(0.25)) * std::log(0.75)));
  // clamped at the ends
  CHECK(std::isfinite(attention_loss_pixel(0.0, true, p)));
  CHECK(attention_loss_pixel(1.0, true, p) == doctest::Approx(attention_loss_pixel(1.0 - kProbEps, true, p)));
  CHECK(attention_loss_pixel_grad(1.0, true, p) == 0.0);
  // analytic derivative vs a centred difference
  for (double x : {0.1, 0.4, 0.9})
    for (bool label : {true, false}) {
      const double h = 1e-6;
      const double num = (attention_loss_pixel(x + h, label, p) - attention_loss_pixel(x - h, label, p)) / (2 * h);
      CHECK(attention_loss_pixel_grad(x, label, p) == doctest::Approx(num).epsilon(1e-6));
    }
  CHECK_THROWS_AS((AttentionParams{0.5, 0.0, 0.5}.validate()), ParameterError);
}

TEST_CASE("depth loss hand-computed 2x2") {
  DepthGrid gt(2, 2, 2.0, true), pred = gt;
  pred(0, 0) = 2.0 * std::exp(0.5);
  // BerHu with c = 0.1: (0.25 + 0.01) / 0.2 = 1.3 at one pixel; gradient
  // term: squared one-sided differences sum to 1.0.
  const LossResult r = depth_loss(pred, gt);
  CHECK(r.value == doctest::Approx(1.3 / 4 + 1.0 / 4));
  CHECK(depth_loss(gt, gt).value == 0.0);
  const LossResult same = depth_loss(gt, gt);
  for (double g : same.d_depth->values().span()) CHECK(g == 0.0);

  DepthGrid holes = gt;
  holes.set_valid(1, 1, false);
  CHECK_THROWS_AS(depth_loss(gt, DepthGrid(2, 2, 1.0, false)), EmptyDomainError);
  CHECK_NOTHROW(depth_loss(pred, holes));
  CHECK_THROWS_AS(depth_loss(pred, DepthGrid(3, 2, 1.0)), DimensionError);
}

TEST_CASE("contour loss derives alpha from the label share") {
  ProbGrid gt(4, 1, 0.0, true), pred(4, 1, 0.5, true);
  gt(0, 0) = 1.0;
  const double f = std::pow(4.0, std::sqrt(0.5)) * std::log(2.0);
  const LossResult r = contour_loss(pred, gt, {}, AlphaMode::kContourFraction);
  CHECK(r.value == doctest::Approx((0.25 * f + 3 * 0.75 * f) / 4));
  const LossResult inv = contour_loss(pred, gt, {}, AlphaMode::kNonContourFraction);
  CHECK(inv.value == doctest::Approx((0.75 * f + 3 * 0.25 * f) / 4));
  gt(1, 0) = 0.5;
  CHECK_THROWS_AS(contour_loss(pred, gt, {}), DomainError);
}

TEST_CASE("normals loss is one minus cosine") {
  NormalGrid gt(3, 1, Vec3{0, 0, -1}, true), pred = gt;
  pred(0, 0) = {0, 0, -5};  // scale does not matter
  pred(1, 0) = {1, 0, 0};   // orthogonal
  pred(2, 0) = {0, 0, 1};   // opposite
  CHECK(normals_loss(pred, gt).value == doctest::Approx((0.0 + 1.0 + 2.0) / 3));
  CHECK(normals_loss(gt, gt).value == 0.0);
  pred(0, 0) = {0, 0, 0};
  CHECK_THROWS_AS(normals_loss(pred, gt), DomainError);
}

TEST_CASE("depth/contour consensus on flat depth") {
  DepthGrid d(3, 3, 2.0, true);
  ProbGrid c(3, 3, 0.5, true);
  // only the centre pixel has a Laplacian: gradient and Laplacian are zero,
  // leaving mu * (mean C - log(1 - C))
  const LossResult r = depth_contour_consensus(d, c, 2.0);
  CHECK(r.value == doctest::Approx(2.0 * (0.5 + std::log(2.0))));
  CHECK(depth_contour_consensus(d, c, 2.0, ContourNorm::kL2Mean).value == doctest::Approx(r.value));
  CHECK_THROWS_AS(depth_contour_consensus(DepthGrid(2, 2, 1.0), ProbGrid(2, 2, 0.5), 1.0), DimensionError);
  DepthGrid hole = d;
  hole.set_valid(1, 1, false);
  CHECK_THROWS_AS(depth_contour_consensus(hole, c, 1.0), EmptyDomainError);
}

TEST_CASE("depth/contour consensus rewards contours at large steps") {
  // 3 m step: gradient 1.5, |Laplacian| 3 on both sides
  DepthGrid d(6, 6, 5.0, true);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 3; ++x) d(x, y) = 2.0;
  ProbGrid at_step(6, 6, 0.02, true), elsewhere(6, 6, 0.02, true);
  for (int y = 0; y < 6; ++y) {
    at_step(2, y) = at_step(3, y) = 0.98;
    elsewhere(0, y) = elsewhere(5, y) = 0.98;
  }
  CHECK(depth_contour_consensus(d, at_step, 1.0).value < depth_contour_consensus(d, elsewhere, 1.0).value);
}

TEST_CASE("near-side contour labels beat uniform 0.5 only for moderate steps") {
  // The far-side pixel carries no label but a large |grad|^2 |Laplacian|
  // (about s^3 / 4), so very tall steps flip the comparison.
  auto margin = [](double step) {
    synth::SceneSpec s;
    s.background = 2.0 + step;
    s.primitives.push_back(synth::RectPrim{0, 0, 30, 64, 2.0});
    const synth::SceneTruth t = synth::render(s);
    const ProbGrid half(64, 64, 0.5, true);
    return depth_contour_consensus(t.depth, half, 1.0).value -
           depth_contour_consensus(t.depth, synth::contour_probabilities(t.contours), 1.0).value;
  };
  CHECK(margin(0.5) > 0.0);
  CHECK(margin(1.5) > 0.0);
  CHECK(margin(2.5) > 0.0);
  CHECK(margin(3.5) < 0.0);
}

TEST_CASE("depth/normal consensus") {
  DepthGrid d(5, 4, 0.0, true);
  const double a = 0.3, b = -0.1;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) d(x, y) = 4.0 + a * x + b * y;
  const double len = std::sqrt(a * a + b * b + 1);
  NormalGrid n(5, 4, Vec3{a / len, b / len, -1 / len}, true);
  CHECK(depth_normal_consensus(d, n).value == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  CHECK(depth_normal_consensus(d, n, NormalConvention::kOutward).value == doctest::Approx(2.0));
  NormalGrid flipped(5, 4, Vec3{-a / len, -b / len, 1 / len}, true);
  CHECK(depth_normal_consensus(d, flipped, NormalConvention::kOutward).value ==
        doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  // no pixel with a usable gradient: zero, no throw
  const LossResult flat = depth_normal_consensus(DepthGrid(4, 4, 1.0), NormalGrid(4, 4, Vec3{0, 0, -1}, true));
  CHECK(flat.value == 0.0);
}

TEST_CASE("total loss is the weighted sum of its terms") {
  std::mt19937_64 rng(3);
  const int w = 6, h = 5;
  const DepthGrid pd = testing::random_depth(rng, w, h, 1, 3), gd = testing::random_depth(rng, w, h, 1, 3);
  ProbGrid pc(w, h, 0.0, true), gc(w, h, 0.0, true);
  NormalGrid pn(w, h, Vec3{}, true), gn(w, h, Vec3{0, 0, -1}, true);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    pc[i] = testing::uniform(rng, 0.05, 0.95);
    gc[i] = rng() % 5 == 0 ? 1.0 : 0.0;
    pn[i] = {testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1), -1.0};
  }
  const LossWeights wts{0.5, 2.0, 3.0, 0.7};
  const TotalLoss t = total_loss({&pd, &gd, &pc, &gc, &pn, &gn}, wts);
  CHECK(t.total.value == doctest::Approx(0.5 * t.depth + 2.0 * t.contour + 3.0 * t.normals + t.depth_contour +
                                         t.depth_normal));
  CHECK(t.depth == doctest::Approx(depth_loss(pd, gd).value));
  CHECK(t.depth_contour == doctest::Approx(depth_contour_consensus(pd, pc, 0.7).value));
  CHECK_THROWS_AS(total_loss({&pd, &gd, &pc, nullptr, &pn, &gn}, wts), ParameterError);
  CHECK_THROWS_AS((LossWeights{-1, 1, 1, 1}.validate()), ParameterError);
}

TEST_CASE("perfect predictions leave only the consensus terms") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const synth::SceneTruth t = synth::render(synth::random_scene({}, seed));
    const ProbGrid c = synth::contour_probabilities(t.contours);
    const TotalLoss l = total_loss({&t.depth, &t.depth, &c, &c, &t.normals, &t.normals}, {});
    CHECK(l.depth == 0.0);
    CHECK(l.normals == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(l.contour < 1e-6);
    CHECK(l.total.value == doctest::Approx(l.depth_contour + l.depth_normal).epsilon(1e-6).scale(1.0));
  }
}
