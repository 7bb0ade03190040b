#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "depthedge/losses/losses.hpp"

namespace depthedge::losses {

enum class Term { kDepth, kContour, kNormals, kDepthContour, kDepthNormal, kTotal };

std::string_view term_name(Term t);
std::optional<Term> parse_term(std::string_view name);
std::vector<Term> all_terms();

struct GradcheckReport {
  Term term;
  double max_rel_error = 0.0;
  std::size_t checked = 0;   // input entries compared
  std::size_t excluded = 0;  // entries skipped near a non-smooth locus
};

/// Compares every analytic gradient of `term` against central finite
/// differences on seeded random size x size inputs, perturbing one input
/// entry at a time by +-step.
///
/// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor)
/// with floor = 1e-4 times the largest analytic gradient entry of the term, so
/// entries that are zero analytically are judged against the term's scale.
///
/// Entries whose perturbation could cross a branch of the loss are skipped:
/// the BerHu switch and kink, the argmax defining the switch point, a sign
/// change of the Laplacian, the clamp interval for probabilities and the
/// inclusion threshold of the depth/normal term.
GradcheckReport gradcheck(Term term, std::uint64_t seed, int size = 8, double step = 1e-6,
                          const LossWeights& weights = {}, const LossOptions& options = {});

}  // namespace depthedge::losses
