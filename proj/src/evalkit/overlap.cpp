#include "lnq/evalkit/overlap.hpp"

#include <cmath>
#include <map>

#include "lnq/measure/diameter.hpp"

namespace lnq {
namespace {

std::vector<ComponentOverlap> overlaps_of(const LabelMap& mask, const LabelMap& other, Connectivity connectivity) {
  const auto set = connected_components(mask, connectivity);
  std::vector<ComponentOverlap> out;
  out.reserve(set.size());
  for (const auto& c : set.components) {
    std::size_t inside = 0;
    for (const auto& v : c.voxels) inside += other.at(v) != 0;
    out.push_back({shortest_diameter(c, set.geometry.spacing).shortest_diameter_mm,
                   static_cast<double>(inside) / static_cast<double>(c.voxels.size())});
  }
  return out;
}

LabelMap binarized(const LabelMap& m) {
  LabelMap out = blank_mask(m);
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] != 0;
  return out;
}

}  // namespace

std::string_view to_string(OverlapDirection d) noexcept {
  return d == OverlapDirection::gt_on_pred ? "gt_on_pred" : "pred_on_gt";
}

OverlapAnalysis component_overlaps(const LabelMap& prediction, const LabelMap& ground_truth,
                                   Connectivity connectivity) {
  require_same_shape(prediction.geometry(), ground_truth.geometry(), "overlap analysis");
  const auto p = binarized(prediction);
  const auto g = binarized(ground_truth);
  return {overlaps_of(g, p, connectivity), overlaps_of(p, g, connectivity)};
}

OverlapBinCurve bin_overlaps(std::span<const ComponentOverlap> values, OverlapDirection direction,
                             double bin_width_mm) {
  if (!(bin_width_mm > 0.0)) throw Error(ErrorCode::InvalidArgument, "bin width must be > 0");
  std::map<std::int64_t, std::pair<double, std::size_t>> acc;
  for (const auto& v : values) {
    auto& [sum, n] = acc[static_cast<std::int64_t>(std::floor(v.shortest_diameter_mm / bin_width_mm))];
    sum += v.overlap;
    ++n;
  }
  OverlapBinCurve curve{direction, bin_width_mm, {}};
  for (const auto& [k, sn] : acc) {
    const auto lo = static_cast<double>(k) * bin_width_mm;
    curve.bins.push_back({lo, lo + bin_width_mm, sn.first / static_cast<double>(sn.second), sn.second});
  }
  return curve;
}

std::pair<OverlapBinCurve, OverlapBinCurve> overlap_curves(const LabelMap& prediction, const LabelMap& ground_truth,
                                                           double bin_width_mm, Connectivity connectivity) {
  const auto a = component_overlaps(prediction, ground_truth, connectivity);
  return {bin_overlaps(a.gt_components, OverlapDirection::gt_on_pred, bin_width_mm),
          bin_overlaps(a.pred_components, OverlapDirection::pred_on_gt, bin_width_mm)};
}

}  // namespace lnq
