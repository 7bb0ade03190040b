#pragma once

#include <cstdint>
#include <span>

#include "depthedge/core/grid.hpp"

namespace depthedge {

// Finite-difference operators in depth units per pixel (no intrinsics).
//
// gradient: central differences (v[x+1] - v[x-1]) / 2 in the interior,
// one-sided forward/backward differences on the image border. An output
// pixel is valid only if the pixel itself and every pixel its x- and
// y-stencils read are valid.
//
// laplacian: 5-point stencil; border pixels are always invalid.

VecField2 gradient(int width, int height, std::span<const double> values,
                   std::span<const std::uint8_t> mask);
ScalarField laplacian(int width, int height, std::span<const double> values,
                      std::span<const std::uint8_t> mask);

template <class Tag>
VecField2 gradient(const Grid<double, Tag>& g) {
  return gradient(g.width(), g.height(), g.values().span(), g.mask().span());
}

template <class Tag>
ScalarField laplacian(const Grid<double, Tag>& g) {
  return laplacian(g.width(), g.height(), g.values().span(), g.mask().span());
}

/// Transpose of gradient: scatters d(out)/d(gradient) back onto the input
/// pixels. Only valid pixels of `seed` contribute.
ScalarField gradient_adjoint(const VecField2& seed);

/// Transpose of laplacian.
ScalarField laplacian_adjoint(const ScalarField& seed);

/// Mean of the valid entries. Throws EmptyDomainError when nothing is valid.
double masked_mean(std::span<const double> values, std::span<const std::uint8_t> mask);

template <class Tag>
double masked_mean(const Grid<double, Tag>& f) {
  return masked_mean(f.values().span(), f.mask().span());
}

template <class Tag>
double masked_mean(const Grid<double, Tag>& f, const Plane<std::uint8_t>& mask) {
  require_same_shape(f, mask, "masked_mean");
  return masked_mean(f.values().span(), mask.span());
}

}  // namespace depthedge
