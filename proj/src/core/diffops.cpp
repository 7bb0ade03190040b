#include "depthedge/core/diffops.hpp"

#include <cmath>
#include <string>

namespace depthedge {
namespace {

// One axis of the gradient stencil at coordinate c on an axis of length n:
// out = w0 * v[i0] + w1 * v[i1].
struct Taps {
  int i0, i1;
  double w0, w1;
};

Taps axis_taps(int c, int n) {
  if (c == 0) return {0, 1, -1.0, 1.0};
  if (c == n - 1) return {n - 2, n - 1, -1.0, 1.0};
  return {c - 1, c + 1, -0.5, 0.5};
}

void check_size(int width, int height, int min_side, const char* op) {
  if (width < min_side || height < min_side)
    throw DimensionError(std::string(op) + " needs at least " + std::to_string(min_side) + "x" +
                         std::to_string(min_side) + ", got " + std::to_string(width) + "x" +
                         std::to_string(height));
}

void check_spans(int width, int height, std::size_t nv, std::size_t nm) {
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (nv != n || nm != n) throw DimensionError("value/mask span does not match grid size");
}

}  // namespace

VecField2 gradient(int width, int height, std::span<const double> values,
                   std::span<const std::uint8_t> mask) {
  check_size(width, height, 2, "gradient");
  check_spans(width, height, values.size(), mask.size());
  VecField2 out(width, height, Vec2{0.0, 0.0}, false);
  auto at = [&](int x, int y) { return static_cast<std::size_t>(y) * width + x; };

  for (int y = 0; y < height; ++y) {
    const Taps ty = axis_taps(y, height);
    for (int x = 0; x < width; ++x) {
      const Taps tx = axis_taps(x, width);
      const bool ok = mask[at(x, y)] && mask[at(tx.i0, y)] && mask[at(tx.i1, y)] &&
                      mask[at(x, ty.i0)] && mask[at(x, ty.i1)];
      if (!ok) continue;
      const double gx = tx.w0 * values[at(tx.i0, y)] + tx.w1 * values[at(tx.i1, y)];
      const double gy = ty.w0 * values[at(x, ty.i0)] + ty.w1 * values[at(x, ty.i1)];
      out(x, y) = Vec2{gx, gy};
      out.set_valid(x, y, true);
    }
  }
  return out;
}

ScalarField laplacian(int width, int height, std::span<const double> values,
                      std::span<const std::uint8_t> mask) {
  check_size(width, height, 3, "laplacian");
  check_spans(width, height, values.size(), mask.size());
  ScalarField out(width, height, 0.0, false);
  auto at = [&](int x, int y) { return static_cast<std::size_t>(y) * width + x; };

  for (int y = 1; y + 1 < height; ++y) {
    for (int x = 1; x + 1 < width; ++x) {
      if (!(mask[at(x, y)] && mask[at(x - 1, y)] && mask[at(x + 1, y)] && mask[at(x, y - 1)] &&
            mask[at(x, y + 1)]))
        continue;
      out(x, y) = values[at(x - 1, y)] + values[at(x + 1, y)] + values[at(x, y - 1)] +
                  values[at(x, y + 1)] - 4.0 * values[at(x, y)];
      out.set_valid(x, y, true);
    }
  }
  return out;
}

ScalarField gradient_adjoint(const VecField2& seed) {
  const int w = seed.width();
  const int h = seed.height();
  check_size(w, h, 2, "gradient_adjoint");
  ScalarField out(w, h, 0.0, true);
  for (int y = 0; y < h; ++y) {
    const Taps ty = axis_taps(y, h);
    for (int x = 0; x < w; ++x) {
      if (!seed.valid(x, y)) continue;
      const Taps tx = axis_taps(x, w);
      const Vec2& s = seed(x, y);
      out(tx.i0, y) += tx.w0 * s[0];
      out(tx.i1, y) += tx.w1 * s[0];
      out(x, ty.i0) += ty.w0 * s[1];
      out(x, ty.i1) += ty.w1 * s[1];
    }
  }
  return out;
}

ScalarField laplacian_adjoint(const ScalarField& seed) {
  const int w = seed.width();
  const int h = seed.height();
  check_size(w, h, 3, "laplacian_adjoint");
  ScalarField out(w, h, 0.0, true);
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      if (!seed.valid(x, y)) continue;
      const double s = seed(x, y);
      out(x - 1, y) += s;
      out(x + 1, y) += s;
      out(x, y - 1) += s;
      out(x, y + 1) += s;
      out(x, y) -= 4.0 * s;
    }
  }
  return out;
}

double masked_mean(std::span<const double> values, std::span<const std::uint8_t> mask) {
  if (values.size() != mask.size()) throw DimensionError("masked_mean: mask size mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask[i]) continue;
    sum += values[i];
    ++n;
  }
  if (n == 0) throw EmptyDomainError("masked_mean over an empty mask");
  return sum / static_cast<double>(n);
}

}  // namespace depthedge
