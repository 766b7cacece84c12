#pragma once

#include "lnq/morph3d/connectivity.hpp"

namespace lnq {

/// Binary dilation repeated `iterations` times with the given structuring
/// element. A voxel is set iff it lies within `iterations` element steps of
/// the input foreground. Voxels outside the volume count as background.
[[nodiscard]] LabelMap dilate(const LabelMap& mask, Connectivity connectivity = kDefaultConnectivity,
                              int iterations = 1);

}  // namespace lnq
