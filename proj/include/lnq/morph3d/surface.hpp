#pragma once

#include <vector>

#include "lnq/volgrid/volume.hpp"

namespace lnq {

/// Foreground voxels with at least one 6-neighbour that is background or
/// outside the volume, in raster order.
[[nodiscard]] std::vector<Index3> surface_voxels(const LabelMap& mask);

enum class DistanceMethod {
  /// Pick whichever of the two exact methods is cheaper for the inputs.
  automatic,
  /// Pairwise O(n*m) scan.
  brute_force,
  /// Separable exact squared Euclidean distance transform over the joint
  /// bounding box of both voxel sets.
  distance_transform,
};

/// For every voxel of `from`, the Euclidean distance in mm (between voxel
/// centres) to the nearest voxel of `to`. Throws EmptySurface if `to` is
/// empty.
[[nodiscard]] std::vector<double> directed_surface_distances(std::span<const Index3> from,
                                                             std::span<const Index3> to,
                                                             const Vec3& spacing,
                                                             DistanceMethod method = DistanceMethod::automatic);

}  // namespace lnq
