#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "depthedge/edges/edges.hpp"
#include "depthedge/simd/kernels.hpp"

namespace depthedge::edges {
namespace {

std::vector<double> gaussian_taps(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[k + radius] = std::exp(-(k * k) / (2.0 * sigma * sigma));
    sum += taps[k + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable blur with replicated borders.
void smooth(Plane<double>& img, double sigma, const simd::KernelTable& k) {
  const std::vector<double> taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  const int w = img.width();
  const int h = img.height();

  Plane<double> tmp(w, h);
  std::vector<double> padded(w + 2 * r);
  for (int y = 0; y < h; ++y) {
    const auto row = img.row(y);
    for (int i = 0; i < w + 2 * r; ++i) padded[i] = row[std::clamp(i - r, 0, w - 1)];
    k.correlate(padded.data(), w, taps.data(), taps.size(), tmp.row(y).data());
  }

  std::vector<const double*> rows(taps.size());
  for (int y = 0; y < h; ++y) {
    for (int t = 0; t < static_cast<int>(taps.size()); ++t)
      rows[t] = tmp.row(std::clamp(y + t - r, 0, h - 1)).data();
    k.weighted_rows(rows.data(), taps.data(), taps.size(), w, img.row(y).data());
  }
}

// Central differences inside, one-sided on the border.
void differentiate(const Plane<double>& s, Plane<double>& dx, Plane<double>& dy,
                   const simd::KernelTable& k) {
  const int w = s.width();
  const int h = s.height();
  for (int y = 0; y < h; ++y) {
    const double* row = s.row(y).data();
    double* out = dx.row(y).data();
    k.scaled_diff(row + 2, row, 0.5, w - 2, out + 1);
    out[0] = (row[1] - row[0]) * 1.0;
    out[w - 1] = (row[w - 1] - row[w - 2]) * 1.0;
  }
  k.scaled_diff(s.row(1).data(), s.row(0).data(), 1.0, w, dy.row(0).data());
  for (int y = 1; y + 1 < h; ++y)
    k.scaled_diff(s.row(y + 1).data(), s.row(y - 1).data(), 0.5, w, dy.row(y).data());
  k.scaled_diff(s.row(h - 1).data(), s.row(h - 2).data(), 1.0, w, dy.row(h - 1).data());
}

}  // namespace

void CannyParams::validate() const {
  if (!(sigma_low >= 0.0 && sigma_low < sigma_high))
    throw ParameterError("canny thresholds need 0 <= sigma_low < sigma_high");
  if (!(gauss_sigma >= 0.0) || !std::isfinite(gauss_sigma))
    throw ParameterError("gauss_sigma must be >= 0");
}

const std::vector<SigmaPreset>& standard_presets() {
  static const std::vector<SigmaPreset> presets = {
      {"0.1_0.2", 0.1, 0.2},
      {"0.01_0.1", 0.01, 0.1},
      {"0.005_0.06", 0.005, 0.06},
      {"0.03_0.05", 0.03, 0.05},
  };
  return presets;
}

const SigmaPreset* find_preset(const std::string& name) {
  for (const SigmaPreset& p : standard_presets())
    if (p.name == name) return &p;
  return nullptr;
}

std::string preset_label(double sigma_low, double sigma_high) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g_%g", sigma_low, sigma_high);
  return buf;
}

ScalarField normalize_depth(const DepthGrid& d) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.valid(i)) continue;
    if (!any) {
      lo = hi = d[i];
      any = true;
    }
    lo = std::min(lo, d[i]);
    hi = std::max(hi, d[i]);
  }
  if (!any) throw EmptyDomainError("normalize_depth: no valid pixel");
  if (!(hi > lo)) throw DegenerateRangeError("normalize_depth: constant depth has no dynamic range");
  ScalarField out(d.width(), d.height(), 0.0, false);
  const double span = hi - lo;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.valid(i)) continue;
    out[i] = (d[i] - lo) / span;
    out.set_valid(i, true);
  }
  return out;
}

EdgeMap canny(const ScalarField& img, const CannyParams& params) {
  params.validate();
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) throw DimensionError("canny needs at least 3x3");
  const simd::KernelTable& k = simd::kernels();

  Plane<double> s(w, h);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = img.valid(i) ? img[i] : 0.0;
  if (params.gauss_sigma > 0.0) smooth(s, params.gauss_sigma, k);

  Plane<double> dx(w, h), dy(w, h), mag(w, h);
  differentiate(s, dx, dy, k);
  k.magnitude(dx.span().data(), dy.span().data(), mag.size(), mag.span().data());

  double gmax = 0.0;
  for (std::size_t i = 0; i < mag.size(); ++i)
    if (img.valid(i)) gmax = std::max(gmax, mag[i]);
  EdgeMap edges(w, h, 0);
  if (!(gmax > 0.0)) return edges;

  const double tie = 1e-9 * gmax;
  // True when neighbour q suppresses p. Outside pixels never do.
  auto beats = [&](int qx, int qy, int px, int py) {
    if (!mag.contains(qx, qy) || !img.valid(qx, qy)) return false;
    const double mq = mag(qx, qy);
    const double mp = mag(px, py);
    if (mq > mp + tie) return true;
    if (mq < mp - tie) return false;
    if (s(qx, qy) != s(px, py)) return s(qx, qy) < s(px, py);
    return mag.index(qx, qy) < mag.index(px, py);
  };

  constexpr double kTan22 = 0.41421356237309503;  // tan(22.5 deg)
  constexpr double kTan67 = 2.4142135623730949;   // tan(67.5 deg)
  Plane<std::uint8_t> candidate(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.valid(x, y) || !(mag(x, y) > 0.0)) continue;
      const double gx = dx(x, y);
      const double gy = dy(x, y);
      const double ax = std::abs(gx);
      const double ay = std::abs(gy);
      int ox, oy;
      if (ay <= ax * kTan22) {
        ox = 1, oy = 0;
      } else if (ay > ax * kTan67) {
        ox = 0, oy = 1;
      } else {
        ox = 1, oy = (gx * gy > 0.0) ? 1 : -1;
      }
      if (beats(x + ox, y + oy, x, y) || beats(x - ox, y - oy, x, y)) continue;
      candidate(x, y) = 1;
    }
  }

  const double low = params.sigma_low * gmax;
  const double high = params.sigma_high * gmax;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    if (candidate[i] && mag[i] > high) {
      edges[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    for (int oy = -1; oy <= 1; ++oy) {
      for (int ox = -1; ox <= 1; ++ox) {
        const int nx = x + ox;
        const int ny = y + oy;
        if (!edges.contains(nx, ny)) continue;
        const std::size_t j = edges.index(nx, ny);
        if (edges[j] || !candidate[j] || !(mag[j] > low)) continue;
        edges[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return edges;
}

}  // namespace depthedge::edges
