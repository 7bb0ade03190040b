#include "depthedge/core/grid.hpp"

#include <cmath>

namespace depthedge {
namespace {

std::string where(std::size_t i, int width) {
  return "(" + std::to_string(i % width) + ", " + std::to_string(i / width) + ")";
}

}  // namespace

void validate(const DepthGrid& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.valid(i)) continue;
    if (!std::isfinite(d[i]) || d[i] <= 0.0)
      throw DomainError("depth must be finite and > 0 at valid pixel " + where(i, d.width()));
  }
}

void validate(const ProbGrid& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.valid(i)) continue;
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw DomainError("probability outside [0,1] at valid pixel " + where(i, p.width()));
  }
}

void validate_unit(const NormalGrid& n, double tol) {
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!n.valid(i)) continue;
    const Vec3& v = n[i];
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(std::abs(len - 1.0) <= tol))
      throw DomainError("normal not unit length at valid pixel " + where(i, n.width()));
  }
}

}  // namespace depthedge
