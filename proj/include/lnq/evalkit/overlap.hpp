#pragma once

#include <string_view>
#include <vector>

#include "lnq/morph3d/connectivity.hpp"

namespace lnq {

enum class OverlapDirection {
  /// Each ground-truth component's covered fraction: sensitivity proxy.
  gt_on_pred,
  /// Each predicted component's fraction inside ground truth: precision proxy.
  pred_on_gt,
};

[[nodiscard]] std::string_view to_string(OverlapDirection d) noexcept;

struct OverlapBin {
  double lo_mm = 0.0;
  double hi_mm = 0.0;
  /// Unweighted mean over the components of the bin.
  double mean_overlap = 0.0;
  std::size_t n = 0;
};

/// Mean component overlap as a function of shortest diameter. Only
/// populated bins are listed, in ascending order.
struct OverlapBinCurve {
  OverlapDirection direction = OverlapDirection::gt_on_pred;
  double bin_width_mm = 2.5;
  std::vector<OverlapBin> bins;
};

/// One overlap value per component with its shortest diameter.
struct ComponentOverlap {
  double shortest_diameter_mm = 0.0;
  double overlap = 0.0;
};

struct OverlapAnalysis {
  std::vector<ComponentOverlap> gt_components;
  std::vector<ComponentOverlap> pred_components;
};

/// Per-component overlaps of one case: |g∩P|/|g| for every ground-truth
/// component g, |p∩G|/|p| for every predicted component p.
[[nodiscard]] OverlapAnalysis component_overlaps(const LabelMap& prediction, const LabelMap& ground_truth,
                                                 Connectivity connectivity = kDefaultConnectivity);

/// Bins the component overlaps by diameter in [k*w, (k+1)*w) steps.
[[nodiscard]] OverlapBinCurve bin_overlaps(std::span<const ComponentOverlap> values, OverlapDirection direction,
                                           double bin_width_mm = 2.5);

/// Both curves for one case.
[[nodiscard]] std::pair<OverlapBinCurve, OverlapBinCurve> overlap_curves(
    const LabelMap& prediction, const LabelMap& ground_truth, double bin_width_mm = 2.5,
    Connectivity connectivity = kDefaultConnectivity);

}  // namespace lnq
