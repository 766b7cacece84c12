#pragma once

#include <span>
#include <vector>

#include "lnq/morph3d/components.hpp"

namespace lnq {

/// RECIST-style axial measurement of one component.
struct DiameterMeasurement {
  int component_id = 0;
  double shortest_diameter_mm = 0.0;
  std::int64_t slice_index = 0;
  /// Long axis on the same slice.
  double long_axis_mm = 0.0;
};

/// Short/long axis of one axial slice of a component.
struct SliceAxes {
  double short_axis_mm = 0.0;
  double long_axis_mm = 0.0;
};

/// Measures the (y, x) voxel centres of one axial slice. The long axis is
/// the largest pairwise distance; the short axis is the extent of the points
/// perpendicular to it (the largest such extent if several pairs tie for the
/// long axis). Both get one in-plane voxel, mean(sy, sx), added for the voxel
/// footprint.
[[nodiscard]] SliceAxes measure_axial_slice(std::span<const std::pair<std::int64_t, std::int64_t>> yx,
                                            double spacing_y, double spacing_x);

/// Shortest axial diameter: the slice whose short axis is largest (lowest
/// slice index on ties).
[[nodiscard]] DiameterMeasurement shortest_diameter(std::span<const Index3> voxels, const Vec3& spacing,
                                                    int component_id = 0);
[[nodiscard]] DiameterMeasurement shortest_diameter(const Component& component, const Vec3& spacing);

/// Measures every component and stores the result in `shortest_diameter_mm`.
std::vector<DiameterMeasurement> measure_components(ComponentSet& set);

struct EnlargementRule {
  double threshold_mm = 10.0;
};

/// Enlarged means shortest diameter >= threshold.
[[nodiscard]] bool classify_enlarged(const DiameterMeasurement& m, const EnlargementRule& rule = {});
[[nodiscard]] bool classify_enlarged(double shortest_diameter_mm, const EnlargementRule& rule = {});

/// Default postprocessing threshold.
inline constexpr double kDefaultMinShortDiameterMm = 9.5;

/// Removes components whose shortest diameter is below the threshold; all
/// other voxels are left as they are.
[[nodiscard]] LabelMap postprocess_filter(const LabelMap& prediction,
                                          double min_short_diameter_mm = kDefaultMinShortDiameterMm,
                                          Connectivity connectivity = kDefaultConnectivity);

}  // namespace lnq
