#pragma once

#include <string>

#include "lnq/morph3d/surface.hpp"

namespace lnq {

/// 2|P∩G| / (|P|+|G|); 1.0 when both masks are empty.
[[nodiscard]] double dice(const LabelMap& prediction, const LabelMap& ground_truth);

struct AssdResult {
  double assd_mm = 0.0;
  /// Set when at least one mask was empty and the convention value was used.
  bool fallback_used = false;
};

/// Average symmetric surface distance: all directed surface distances from
/// prediction to ground truth and back, pooled into one mean. If exactly one
/// mask is empty the physical diagonal of the volume is returned instead; two
/// empty masks give 0. Both cases set `fallback_used`.
[[nodiscard]] AssdResult assd(const LabelMap& prediction, const LabelMap& ground_truth,
                              DistanceMethod method = DistanceMethod::automatic);

/// Length of the volume's physical diagonal, sqrt(sum((dims * spacing)^2)).
[[nodiscard]] double physical_diagonal_mm(const Geometry& g) noexcept;

struct CaseMetrics {
  std::string case_id;
  double dice = 0.0;
  double assd_mm = 0.0;
  bool assd_fallback_used = false;
};

[[nodiscard]] CaseMetrics evaluate_case(std::string case_id, const LabelMap& prediction,
                                        const LabelMap& ground_truth);

}  // namespace lnq
