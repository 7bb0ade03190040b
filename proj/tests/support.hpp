#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "depthedge/core/grid.hpp"

namespace testing {

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

// Random depth grid with values in [lo, hi] and roughly `hole` invalid pixels.
inline depthedge::DepthGrid random_depth(std::mt19937_64& rng, int w, int h, double lo = 0.5, double hi = 8.0,
                                         double hole = 0.0) {
  depthedge::DepthGrid d(w, h, 0.0, true);
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = uniform(rng, lo, hi);
    if (unit(rng) < hole) {
      d[i] = 0.0;
      d.set_valid(i, false);
    }
  }
  return d;
}

inline depthedge::EdgeMap random_mask(std::mt19937_64& rng, int w, int h, double density) {
  depthedge::EdgeMap m(w, h, 0);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = unit(rng) < density ? 1 : 0;
  return m;
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("depthedge_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
