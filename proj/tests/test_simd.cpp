#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "depthedge/simd/kernels.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace depthedge::simd;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = testing::uniform(rng, lo, hi);
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels are always available") {
  const std::vector<Isa> isas = available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == Isa::kScalar);
  CHECK(kernels_for(Isa::kScalar) != nullptr);
  MESSAGE("active ISA: " << isa_name(kernels().isa));
}

TEST_CASE("scalar reference values") {
  const KernelTable& k = *kernels_for(Isa::kScalar);
  const double src[] = {1, 2, 3, 4, 5};
  const double taps[] = {0.25, 0.5, 0.25};
  double dst[3];
  k.correlate(src, 3, taps, 3, dst);
  CHECK(dst[0] == 2.0);
  CHECK(dst[2] == 4.0);

  const double gx[] = {3.0}, gy[] = {4.0};
  double m[1];
  k.magnitude(gx, gy, 1, m);
  CHECK(m[0] == 5.0);

  const double p[] = {1.0, 2.0, 4.0, 7.0};
  const double g[] = {1.0, 1.0, 1.0, 1.0};
  const std::uint8_t mask[] = {1, 1, 1, 0};
  const LinearErrorSums s = k.linear_errors(p, g, mask, 4);
  CHECK(s.count == 3);
  CHECK(s.abs_rel == 4.0);
  CHECK(s.sq == 10.0);
  CHECK(s.within[0] == 1);
  CHECK(s.within[1] == 1);
  CHECK(s.within[2] == 1);  // 2 is not < 1.953125
}

TEST_CASE("vector kernels match the scalar reference") {
  const KernelTable& ref = *kernels_for(Isa::kScalar);
  std::mt19937_64 rng(5);
  for (Isa isa : available_isas()) {
    if (isa == Isa::kScalar) continue;
    const KernelTable& k = *kernels_for(isa);
    CAPTURE(isa_name(isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 1001u}) {
      CAPTURE(n);
      for (std::size_t ntaps : {1u, 3u, 7u, 13u}) {
        const std::vector<double> src = random_vec(rng, n + ntaps - 1, -2, 2);
        const std::vector<double> taps = random_vec(rng, ntaps, 0, 1);
        std::vector<double> a(n), b(n);
        ref.correlate(src.data(), n, taps.data(), ntaps, a.data());
        k.correlate(src.data(), n, taps.data(), ntaps, b.data());
        CHECK(bit_equal(a, b));

        std::vector<std::vector<double>> rows;
        std::vector<const double*> ptrs;
        for (std::size_t t = 0; t < ntaps; ++t) rows.push_back(random_vec(rng, n, -2, 2));
        for (const auto& r : rows) ptrs.push_back(r.data());
        ref.weighted_rows(ptrs.data(), taps.data(), ntaps, n, a.data());
        k.weighted_rows(ptrs.data(), taps.data(), ntaps, n, b.data());
        CHECK(bit_equal(a, b));
      }
      const std::vector<double> x = random_vec(rng, n, -3, 3), y = random_vec(rng, n, -3, 3);
      std::vector<double> a(n), b(n);
      ref.scaled_diff(x.data(), y.data(), 0.5, n, a.data());
      k.scaled_diff(x.data(), y.data(), 0.5, n, b.data());
      CHECK(bit_equal(a, b));
      ref.magnitude(x.data(), y.data(), n, a.data());
      k.magnitude(x.data(), y.data(), n, b.data());
      CHECK(bit_equal(a, b));

      std::vector<double> p = random_vec(rng, n, 0.5, 10), g = random_vec(rng, n, 0.5, 10);
      std::vector<std::uint8_t> mask(n);
      for (std::size_t i = 0; i < n; ++i) {
        mask[i] = (rng() % 4) != 0;
        if (!mask[i]) p[i] = (i % 2) ? 0.0 : std::nan("");  // masked lanes may hold garbage
      }
      const LinearErrorSums ls = ref.linear_errors(p.data(), g.data(), mask.data(), n);
      const LinearErrorSums lv = k.linear_errors(p.data(), g.data(), mask.data(), n);
      CHECK(ls.count == lv.count);
      CHECK(ls.within == lv.within);
      CHECK(lv.abs_rel == doctest::Approx(ls.abs_rel).epsilon(1e-12));
      CHECK(lv.sq == doctest::Approx(ls.sq).epsilon(1e-12));

      const LogErrorSums gs = ref.log_errors(p.data(), g.data(), mask.data(), n);
      const LogErrorSums gv = k.log_errors(p.data(), g.data(), mask.data(), n);
      CHECK(gs.count == gv.count);
      CHECK(gv.abs == doctest::Approx(gs.abs).epsilon(1e-12));
      CHECK(gv.sq == doctest::Approx(gs.sq).epsilon(1e-12));
    }
  }
}
