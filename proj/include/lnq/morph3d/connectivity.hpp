#pragma once

#include <span>

#include "lnq/volgrid/volume.hpp"

namespace lnq {

/// Voxel adjacency: face (6), face+edge (18) or face+edge+corner (26).
enum class Connectivity : int { six = 6, eighteen = 18, twentysix = 26 };

inline constexpr Connectivity kDefaultConnectivity = Connectivity::twentysix;

/// Throws InvalidArgument for anything other than 6, 18 or 26.
Connectivity connectivity_from_int(int value);

/// The non-zero neighbour offsets of the structuring element, in raster order.
std::span<const Index3> neighbor_offsets(Connectivity c);

}  // namespace lnq
