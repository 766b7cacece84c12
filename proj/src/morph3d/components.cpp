#include "lnq/morph3d/components.hpp"

#include <algorithm>
#include <numeric>

#include "lnq/morph3d/bbox.hpp"

namespace lnq {
namespace {

class DisjointSets {
 public:
  std::int32_t make() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }
  std::int32_t find(std::int32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller root wins so that the result does not depend on union order.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::int32_t> parent_;
};

}  // namespace

ComponentSet connected_components(const LabelMap& mask, Connectivity connectivity) {
  require_binary(mask, "connected_components");
  const auto& g = mask.geometry();

  // Neighbours already visited by a raster scan.
  std::vector<Index3> backward;
  for (const auto& o : neighbor_offsets(connectivity)) {
    if (o.z < 0 || (o.z == 0 && (o.y < 0 || (o.y == 0 && o.x < 0)))) backward.push_back(o);
  }

  constexpr std::int32_t kNone = -1;
  std::vector<std::int32_t> provisional(g.voxel_count(), kNone);
  DisjointSets sets;
  for (std::int64_t z = 0; z < g.dims.z; ++z)
    for (std::int64_t y = 0; y < g.dims.y; ++y)
      for (std::int64_t x = 0; x < g.dims.x; ++x) {
        const auto here = g.offset(z, y, x);
        if (mask[here] == 0) continue;
        std::int32_t label = kNone;
        for (const auto& o : backward) {
          const Index3 n{z + o.z, y + o.y, x + o.x};
          if (!g.contains(n)) continue;
          const auto nl = provisional[g.offset(n)];
          if (nl == kNone) continue;
          if (label == kNone) {
            label = nl;
          } else {
            sets.unite(label, nl);
          }
        }
        provisional[here] = label == kNone ? sets.make() : label;
      }

  // Gather voxels per root, in raster order.
  std::vector<std::int32_t> slot_of_root;
  std::vector<std::vector<Index3>> groups;
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    if (provisional[i] == kNone) continue;
    const auto root = sets.find(provisional[i]);
    if (static_cast<std::size_t>(root) >= slot_of_root.size()) slot_of_root.resize(root + 1, kNone);
    if (slot_of_root[root] == kNone) {
      slot_of_root[root] = static_cast<std::int32_t>(groups.size());
      groups.emplace_back();
    }
    groups[slot_of_root[root]].push_back(g.index_of(i));
  }

  // Groups are already ordered by first voxel; a stable sort by size keeps
  // that as the tie-break.
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return groups[a].size() > groups[b].size(); });

  ComponentSet out;
  out.geometry = g;
  out.components.reserve(groups.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    Component c;
    c.id = static_cast<int>(k + 1);
    c.voxels = std::move(groups[order[k]]);
    c.volume_mm3 = static_cast<double>(c.voxels.size()) * g.voxel_volume_mm3();
    out.components.push_back(std::move(c));
  }
  return out;
}

std::vector<std::int32_t> component_id_map(const ComponentSet& set) {
  std::vector<std::int32_t> ids(set.geometry.voxel_count(), 0);
  for (const auto& c : set.components)
    for (const auto& v : c.voxels) ids[set.geometry.offset(v)] = c.id;
  return ids;
}

LabelMap component_mask(const ComponentSet& set, const Component& component) {
  LabelMap mask(set.geometry, VolumeKind::label, std::uint8_t{0});
  for (const auto& v : component.voxels) mask.at(v) = 1;
  return mask;
}

BoundingBox component_bounds(const Component& component) {
  if (component.voxels.empty()) throw Error(ErrorCode::EmptyInput, "component has no voxels");
  BoundingBox box{component.voxels.front(), component.voxels.front(), 0.0};
  for (const auto& v : component.voxels) {
    box.lo = {std::min(box.lo.z, v.z), std::min(box.lo.y, v.y), std::min(box.lo.x, v.x)};
    box.hi = {std::max(box.hi.z, v.z), std::max(box.hi.y, v.y), std::max(box.hi.x, v.x)};
  }
  return box;
}

}  // namespace lnq
