#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace depthedge::simd {
namespace {

constexpr KernelTable kScalarTable{Isa::kScalar,         scalar::correlate,     scalar::weighted_rows,
                                   scalar::scaled_diff,  scalar::magnitude,     scalar::linear_errors,
                                   scalar::log_errors};

#if defined(DEPTHEDGE_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2,         avx2::correlate,     avx2::weighted_rows,
                                 avx2::scaled_diff,  avx2::magnitude,     avx2::linear_errors,
                                 avx2::log_errors};
#endif

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(DEPTHEDGE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& select() {
  if (const char* forced = std::getenv("DEPTHEDGE_ISA")) {
    const std::string want(forced);
    if (want == "scalar") return kScalarTable;
    if (want == "avx2")
      if (const KernelTable* t = kernels_for(Isa::kAvx2)) return *t;
  }
  if (const KernelTable* t = kernels_for(Isa::kAvx2)) return *t;
  return kScalarTable;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* kernels_for(Isa isa) {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::kScalar:
      return &kScalarTable;
    case Isa::kAvx2:
#if defined(DEPTHEDGE_HAVE_AVX2)
      return &kAvx2Table;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& kernels() {
  static const KernelTable& active = select();
  return active;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2})
    if (kernels_for(isa)) out.push_back(isa);
  return out;
}

}  // namespace depthedge::simd
