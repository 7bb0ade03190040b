#include <cmath>
#include <limits>
#include <vector>

#include "depthedge/edges/edges.hpp"

namespace depthedge::edges {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (q - v)^2 + f[v] over the finite samples of f.
// All finite inputs are integers, so every output is an exact integer.
void envelope_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                 std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    auto intersect = [&](int p) {
      return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
    };
    double s = intersect(v[k]);
    while (s <= z[k]) s = intersect(v[--k]);  // z[0] = -inf stops the walk
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double off = double(q - v[j]);
    d[q] = off * off + f[v[j]];
  }
}

}  // namespace

DistanceField edt(const EdgeMap& src) {
  const int w = src.width();
  const int h = src.height();
  Plane<double> sq(w, h, kInf);
  for (std::size_t i = 0; i < sq.size(); ++i)
    if (src[i]) sq[i] = 0.0;

  const int longest = std::max(w, h);
  std::vector<double> f, d;
  std::vector<int> v(longest + 1);
  std::vector<double> z(longest + 2);

  f.resize(h);
  d.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = sq(x, y);
    envelope_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) sq(x, y) = d[y];
  }
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = sq(x, y);
    envelope_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) sq(x, y) = d[x];
  }

  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::sqrt(sq[i]);
  return sq;
}

ChamferResult truncated_chamfer(const EdgeMap& from, const EdgeMap& to, double theta) {
  require_same_shape(from, to, "truncated_chamfer");
  if (!(theta > 0.0)) throw ParameterError("truncation radius theta must be > 0");
  const DistanceField dist = edt(to);
  ChamferResult r;
  double sum = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!from[i]) continue;
    ++r.edge_pixels;
    if (dist[i] > theta) {
      ++r.truncated;
      continue;
    }
    sum += dist[i];
  }
  if (r.edge_pixels == 0) throw UndefinedMetricError("truncated chamfer from an empty edge set");
  r.value = sum / static_cast<double>(r.edge_pixels);
  return r;
}

double dbe_accuracy(const EdgeMap& pred, const EdgeMap& gt, double theta) {
  return truncated_chamfer(pred, gt, theta).value;
}

double dbe_completeness(const EdgeMap& pred, const EdgeMap& gt, double theta) {
  return truncated_chamfer(gt, pred, theta).value;
}

DdeResult dde(const DepthGrid& pred, const DepthGrid& gt, double d_ref) {
  require_same_shape(pred, gt, "dde");
  if (!(d_ref > 0.0)) throw ParameterError("dde reference depth must be > 0");
  std::size_t n = 0, same = 0, minus = 0, plus = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred.valid(i) || !gt.valid(i)) continue;
    ++n;
    const bool pred_near = pred[i] < d_ref;
    const bool gt_near = gt[i] < d_ref;
    if (pred_near == gt_near)
      ++same;
    else if (pred_near)
      ++minus;
    else
      ++plus;
  }
  if (n == 0) throw EmptyDomainError("dde: no pixel valid in both maps");
  const double scale = 100.0 / static_cast<double>(n);
  return {same * scale, minus * scale, plus * scale};
}

}  // namespace depthedge::edges
