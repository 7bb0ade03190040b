#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "depthedge/core/errors.hpp"

namespace depthedge {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

/// Dense row-major 2D array without a validity mask.
template <class T>
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw DimensionError("negative grid dimension");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> span() noexcept { return data_; }
  std::span<const T> span() const noexcept { return data_; }
  std::span<T> row(int y) noexcept { return std::span<T>(data_).subspan(index(0, y), width_); }
  std::span<const T> row(int y) const noexcept {
    return std::span<const T>(data_).subspan(index(0, y), width_);
  }

  bool operator==(const Plane&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Per-pixel values plus a validity mask (1 = valid). The tag keeps
/// semantically different grids (depth, probability, ...) from mixing.
template <class T, class Tag>
class Grid {
 public:
  using value_type = T;
  using tag_type = Tag;

  Grid() = default;
  Grid(int width, int height, T fill = T{}, bool valid = true)
      : values_(width, height, fill), mask_(width, height, valid ? 1 : 0) {}
  Grid(Plane<T> values, Plane<std::uint8_t> mask) : values_(std::move(values)), mask_(std::move(mask)) {
    if (values_.width() != mask_.width() || values_.height() != mask_.height())
      throw DimensionError("mask and values differ in shape");
  }

  int width() const noexcept { return values_.width(); }
  int height() const noexcept { return values_.height(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t index(int x, int y) const noexcept { return values_.index(x, y); }
  bool contains(int x, int y) const noexcept { return values_.contains(x, y); }

  T& operator()(int x, int y) noexcept { return values_(x, y); }
  const T& operator()(int x, int y) const noexcept { return values_(x, y); }
  T& operator[](std::size_t i) noexcept { return values_[i]; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }

  bool valid(int x, int y) const noexcept { return mask_(x, y) != 0; }
  bool valid(std::size_t i) const noexcept { return mask_[i] != 0; }
  void set_valid(int x, int y, bool v) noexcept { mask_(x, y) = v ? 1 : 0; }
  void set_valid(std::size_t i, bool v) noexcept { mask_[i] = v ? 1 : 0; }

  std::size_t valid_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(mask_.span().begin(), mask_.span().end(),
                                                  [](std::uint8_t m) { return m != 0; }));
  }

  Plane<T>& values() noexcept { return values_; }
  const Plane<T>& values() const noexcept { return values_; }
  Plane<std::uint8_t>& mask() noexcept { return mask_; }
  const Plane<std::uint8_t>& mask() const noexcept { return mask_; }

  bool operator==(const Grid&) const = default;

 private:
  Plane<T> values_;
  Plane<std::uint8_t> mask_;
};

struct DepthTag {};
struct ProbTag {};
struct ScalarTag {};
struct NormalTag {};
struct Vec2Tag {};
struct Vec3Tag {};

/// Metric depths in meters.
using DepthGrid = Grid<double, DepthTag>;
/// Probabilities in [0, 1].
using ProbGrid = Grid<double, ProbTag>;
using ScalarField = Grid<double, ScalarTag>;
/// Surface normals; ground truth is unit length, predictions need not be.
using NormalGrid = Grid<Vec3, NormalTag>;
using VecField2 = Grid<Vec2, Vec2Tag>;
using VecField3 = Grid<Vec3, Vec3Tag>;

/// Binary edge set. Edge maps carry no validity mask.
using EdgeMap = Plane<std::uint8_t>;

/// Reinterpret a grid under another tag (values and mask are copied).
template <class ToTag, class T, class FromTag>
Grid<T, ToTag> retag(const Grid<T, FromTag>& g) {
  return Grid<T, ToTag>(g.values(), g.mask());
}

template <class A, class B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.width()) + "x" +
                         std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                         std::to_string(b.height()));
}

/// Pixel-wise AND of two masks of equal shape.
template <class A, class B>
Plane<std::uint8_t> mask_and(const A& a, const B& b) {
  require_same_shape(a, b, "mask_and");
  Plane<std::uint8_t> out(a.width(), a.height(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (a.valid(i) && b.valid(i)) ? 1 : 0;
  return out;
}

inline std::size_t popcount(const Plane<std::uint8_t>& m) {
  return static_cast<std::size_t>(
      std::count_if(m.span().begin(), m.span().end(), [](std::uint8_t v) { return v != 0; }));
}

// Invariant checks. Each throws DomainError naming the first offending pixel.
void validate(const DepthGrid& d);
void validate(const ProbGrid& p);
void validate_unit(const NormalGrid& n, double tol = 1e-6);

}  // namespace depthedge
