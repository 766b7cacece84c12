#pragma once

#include <string>

#include "lnq/volgrid/volume.hpp"

namespace lnq {

/// Inclusive index box.
struct BoundingBox {
  Index3 lo;
  Index3 hi;
  double margin_mm = 0.0;

  [[nodiscard]] Index3 extent() const noexcept { return {hi.z - lo.z + 1, hi.y - lo.y + 1, hi.x - lo.x + 1}; }
  [[nodiscard]] std::size_t voxel_count() const noexcept {
    const auto e = extent();
    return static_cast<std::size_t>(e.z * e.y * e.x);
  }
  [[nodiscard]] bool contains(const Index3& i) const noexcept {
    return i.z >= lo.z && i.z <= hi.z && i.y >= lo.y && i.y <= hi.y && i.x >= lo.x && i.x <= hi.x;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Voxels of margin per axis: ceil(margin_mm / spacing).
[[nodiscard]] Index3 margin_voxels(double margin_mm, const Vec3& spacing);

/// Smallest box around all non-zero voxels, grown by `margin_mm` on each
/// side and clamped to the volume. Throws EmptyMask for an empty mask.
[[nodiscard]] BoundingBox bounding_box_of(const LabelMap& mask, double margin_mm = 0.0);

/// Throws OutOfRange if the box is inverted or leaves the lattice.
void require_box_within(const BoundingBox& box, const Geometry& g);

/// Sub-volume covered by `box`; origin moves by lo * spacing.
template <typename T>
[[nodiscard]] Volume<T> crop(const Volume<T>& in, const BoundingBox& box) {
  const auto& g = in.geometry();
  require_box_within(box, g);
  Geometry out = g;
  out.dims = box.extent();
  out.origin = {g.origin.z + static_cast<double>(box.lo.z) * g.spacing.z,
                g.origin.y + static_cast<double>(box.lo.y) * g.spacing.y,
                g.origin.x + static_cast<double>(box.lo.x) * g.spacing.x};
  std::vector<T> data;
  data.reserve(out.voxel_count());
  for (auto z = box.lo.z; z <= box.hi.z; ++z)
    for (auto y = box.lo.y; y <= box.hi.y; ++y) {
      const auto row = in.data().subspan(g.offset(z, y, box.lo.x), static_cast<std::size_t>(out.dims.x));
      data.insert(data.end(), row.begin(), row.end());
    }
  return Volume<T>(out, in.kind(), std::move(data));
}

}  // namespace lnq
