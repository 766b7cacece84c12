#pragma once

#include <optional>
#include <vector>

#include "lnq/morph3d/connectivity.hpp"

namespace lnq {

struct BoundingBox;

/// One connected foreground component.
struct Component {
  int id = 0;
  /// Voxel indices in raster (z-major) order.
  std::vector<Index3> voxels;
  double volume_mm3 = 0.0;
  /// Filled in by the measure module.
  std::optional<double> shortest_diameter_mm;
};

/// Catalog of the components of one mask. Components are ordered by
/// descending voxel count (ties: earlier first voxel first) with ids 1..k.
struct ComponentSet {
  Geometry geometry;
  std::vector<Component> components;

  [[nodiscard]] std::size_t size() const noexcept { return components.size(); }
  [[nodiscard]] bool empty() const noexcept { return components.empty(); }
};

/// Labels the foreground of a binary mask.
[[nodiscard]] ComponentSet connected_components(const LabelMap& mask,
                                                Connectivity connectivity = kDefaultConnectivity);

/// Per-voxel component id (0 = background), flat in z-major order.
[[nodiscard]] std::vector<std::int32_t> component_id_map(const ComponentSet& set);

/// Binary mask of a single component on the set's lattice.
[[nodiscard]] LabelMap component_mask(const ComponentSet& set, const Component& component);

/// Tight index box around a component.
[[nodiscard]] BoundingBox component_bounds(const Component& component);

}  // namespace lnq
