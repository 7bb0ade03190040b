#include "depthedge/losses/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "depthedge/core/diffops.hpp"

namespace depthedge::losses {
namespace {

constexpr std::array<std::string_view, 6> kTermNames = {
    "depth", "contour", "normals", "depth_contour", "depth_normal", "total"};

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 rng_;
};

struct Inputs {
  DepthGrid pred_depth, gt_depth;
  ProbGrid pred_contours, gt_contours;
  NormalGrid pred_normals, gt_normals;
};

Inputs random_inputs(std::uint64_t seed, int n) {
  Uniform u(seed);
  Inputs in;
  in.pred_depth = DepthGrid(n, n, 0.0);
  in.gt_depth = DepthGrid(n, n, 0.0);
  in.pred_contours = ProbGrid(n, n, 0.0);
  in.gt_contours = ProbGrid(n, n, 0.0);
  in.pred_normals = NormalGrid(n, n, Vec3{});
  in.gt_normals = NormalGrid(n, n, Vec3{});

  const double fx = u(0.4, 0.9), fy = u(0.4, 0.9), px = u(0.0, 6.28), py = u(0.0, 6.28);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double smooth = 2.0 + 0.4 * std::sin(fx * x + px) * std::cos(fy * y + py) + 0.05 * x;
      in.pred_depth(x, y) = smooth + u(-0.02, 0.02);
      in.gt_depth(x, y) = in.pred_depth(x, y) * std::exp(u(-0.3, 0.3));
      in.pred_contours(x, y) = u(0.05, 0.95);
      in.gt_contours(x, y) = u() < 0.3 ? 1.0 : 0.0;
      in.pred_normals(x, y) = Vec3{u(-1.0, 1.0), u(-1.0, 1.0), -u(0.5, 1.5)};
      Vec3 g{u(-1.0, 1.0), u(-1.0, 1.0), -u(0.2, 1.0)};
      const double len = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
      in.gt_normals(x, y) = Vec3{g[0] / len, g[1] / len, g[2] / len};
    }
  }
  in.gt_contours[0] = 1.0;
  in.gt_contours[1] = 0.0;
  return in;
}

LossResult evaluate(Term term, const Inputs& in, const LossWeights& w, const LossOptions& o) {
  switch (term) {
    case Term::kDepth:
      return depth_loss(in.pred_depth, in.gt_depth);
    case Term::kContour:
      return contour_loss(in.pred_contours, in.gt_contours, o.attention, o.alpha_mode);
    case Term::kNormals:
      return normals_loss(in.pred_normals, in.gt_normals);
    case Term::kDepthContour:
      return depth_contour_consensus(in.pred_depth, in.pred_contours, w.mu, o.contour_norm);
    case Term::kDepthNormal:
      return depth_normal_consensus(in.pred_depth, in.pred_normals, o.convention);
    case Term::kTotal: {
      LossInputs li{&in.pred_depth,   &in.gt_depth,     &in.pred_contours,
                    &in.gt_contours,  &in.pred_normals, &in.gt_normals};
      return total_loss(li, w, o).total;
    }
  }
  throw ParameterError("unknown loss term");
}

bool uses(Term t, Term component) { return t == component || t == Term::kTotal; }

// Pixels of `field` whose perturbation by +-h may cross a non-smooth locus.
struct Exclusions {
  Plane<std::uint8_t> depth, contours, normals;
};

Exclusions find_exclusions(Term term, const Inputs& in, double h) {
  const int n = in.pred_depth.width();
  Exclusions ex{Plane<std::uint8_t>(n, n, 0), Plane<std::uint8_t>(n, n, 0), Plane<std::uint8_t>(n, n, 0)};

  auto mark_neighbourhood = [&](int x, int y) {
    for (auto [dx, dy] : {std::pair{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}})
      if (ex.depth.contains(x + dx, y + dy)) ex.depth(x + dx, y + dy) = 1;
  };

  if (uses(term, Term::kDepth)) {
    double max_abs = 0.0;
    ScalarField r(n, n, 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = std::log(in.pred_depth[i]) - std::log(in.gt_depth[i]);
      max_abs = std::max(max_abs, std::abs(r[i]));
    }
    const double c = max_abs / 5.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double reach = 2.0 * h / in.pred_depth[i];
      const double a = std::abs(r[i]);
      if (a < reach || std::abs(a - c) < reach || a >= max_abs - reach) ex.depth[i] = 1;
    }
  }
  if (uses(term, Term::kDepthContour)) {
    const ScalarField lap = laplacian(in.pred_depth);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if (lap.valid(x, y) && std::abs(lap(x, y)) <= 8.0 * h) mark_neighbourhood(x, y);
  }
  if (uses(term, Term::kContour) || uses(term, Term::kDepthContour)) {
    for (std::size_t i = 0; i < ex.contours.size(); ++i) {
      const double c = in.pred_contours[i];
      if (c < kProbEps + 2.0 * h || c > 1.0 - kProbEps - 2.0 * h) ex.contours[i] = 1;
    }
  }
  if (uses(term, Term::kDepthNormal)) {
    auto near_threshold = [h](double len) {
      return std::abs(len - kDegenerateGradient) < 2.0 * h || len < 10.0 * h;
    };
    const VecField2 g = gradient(in.pred_depth);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if (g.valid(x, y) && near_threshold(std::hypot(g(x, y)[0], g(x, y)[1]))) mark_neighbourhood(x, y);
    for (std::size_t i = 0; i < ex.normals.size(); ++i)
      if (near_threshold(std::hypot(in.pred_normals[i][0], in.pred_normals[i][1]))) ex.normals[i] = 1;
  }
  return ex;
}

}  // namespace

std::string_view term_name(Term t) { return kTermNames[static_cast<std::size_t>(t)]; }

std::optional<Term> parse_term(std::string_view name) {
  for (std::size_t i = 0; i < kTermNames.size(); ++i)
    if (kTermNames[i] == name) return static_cast<Term>(i);
  return std::nullopt;
}

std::vector<Term> all_terms() {
  return {Term::kDepth, Term::kContour, Term::kNormals, Term::kDepthContour, Term::kDepthNormal, Term::kTotal};
}

GradcheckReport gradcheck(Term term, std::uint64_t seed, int size, double step, const LossWeights& weights,
                          const LossOptions& options) {
  if (size < 4) throw ParameterError("gradcheck size must be at least 4");
  if (!(step > 0.0 && step <= 1e-2)) throw ParameterError("gradcheck step must lie in (0, 1e-2]");

  Inputs in = random_inputs(seed, size);
  const LossResult analytic = evaluate(term, in, weights, options);
  const Exclusions ex = find_exclusions(term, in, step);

  // Collect (analytic, numeric) pairs first so the floor can use the term's scale.
  std::vector<std::pair<double, double>> pairs;
  GradcheckReport report{term};

  auto probe = [&](double& slot, double expected, bool skip) {
    if (skip) {
      ++report.excluded;
      return;
    }
    const double saved = slot;
    slot = saved + step;
    const double up = evaluate(term, in, weights, options).value;
    slot = saved - step;
    const double down = evaluate(term, in, weights, options).value;
    slot = saved;
    pairs.emplace_back(expected, (up - down) / (2.0 * step));
  };

  if (analytic.d_depth)
    for (std::size_t i = 0; i < in.pred_depth.size(); ++i)
      probe(in.pred_depth[i], (*analytic.d_depth)[i], ex.depth[i] != 0);
  if (analytic.d_contours)
    for (std::size_t i = 0; i < in.pred_contours.size(); ++i)
      probe(in.pred_contours[i], (*analytic.d_contours)[i], ex.contours[i] != 0);
  if (analytic.d_normals)
    for (std::size_t i = 0; i < in.pred_normals.size(); ++i)
      for (int k = 0; k < 3; ++k)
        probe(in.pred_normals[i][k], (*analytic.d_normals)[i][k], ex.normals[i] != 0);

  double scale = 0.0;
  for (const auto& [a, num] : pairs) scale = std::max(scale, std::abs(a));
  const double floor = std::max(1e-4 * scale, 1e-300);
  for (const auto& [a, num] : pairs) {
    const double denom = std::max({std::abs(a), std::abs(num), floor});
    report.max_rel_error = std::max(report.max_rel_error, std::abs(a - num) / denom);
  }
  report.checked = pairs.size();
  return report;
}

}  // namespace depthedge::losses
