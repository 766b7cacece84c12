#include "lnq/morph3d/bbox.hpp"

#include <algorithm>
#include <cmath>

namespace lnq {

Index3 margin_voxels(double margin_mm, const Vec3& spacing) {
  if (margin_mm < 0.0) throw Error(ErrorCode::InvalidArgument, "margin must be >= 0");
  // The epsilon keeps exact multiples (e.g. 1.86 / 0.93) from rounding up.
  auto axis = [&](double s) { return static_cast<std::int64_t>(std::ceil(margin_mm / s - 1e-9)); };
  return {std::max<std::int64_t>(0, axis(spacing.z)), std::max<std::int64_t>(0, axis(spacing.y)),
          std::max<std::int64_t>(0, axis(spacing.x))};
}

BoundingBox bounding_box_of(const LabelMap& mask, double margin_mm) {
  const auto& g = mask.geometry();
  BoundingBox box{{g.dims.z, g.dims.y, g.dims.x}, {-1, -1, -1}, margin_mm};
  bool any = false;
  for (std::int64_t z = 0; z < g.dims.z; ++z)
    for (std::int64_t y = 0; y < g.dims.y; ++y)
      for (std::int64_t x = 0; x < g.dims.x; ++x) {
        if (mask.at(z, y, x) == 0) continue;
        any = true;
        box.lo = {std::min(box.lo.z, z), std::min(box.lo.y, y), std::min(box.lo.x, x)};
        box.hi = {std::max(box.hi.z, z), std::max(box.hi.y, y), std::max(box.hi.x, x)};
      }
  if (!any) throw Error(ErrorCode::EmptyMask, "bounding box of an empty mask");

  const auto m = margin_voxels(margin_mm, g.spacing);
  box.lo = {std::max<std::int64_t>(0, box.lo.z - m.z), std::max<std::int64_t>(0, box.lo.y - m.y),
            std::max<std::int64_t>(0, box.lo.x - m.x)};
  box.hi = {std::min(g.dims.z - 1, box.hi.z + m.z), std::min(g.dims.y - 1, box.hi.y + m.y),
            std::min(g.dims.x - 1, box.hi.x + m.x)};
  return box;
}

void require_box_within(const BoundingBox& box, const Geometry& g) {
  const bool ok = box.lo.z >= 0 && box.lo.y >= 0 && box.lo.x >= 0 && box.lo.z <= box.hi.z &&
                  box.lo.y <= box.hi.y && box.lo.x <= box.hi.x && box.hi.z < g.dims.z &&
                  box.hi.y < g.dims.y && box.hi.x < g.dims.x;
  if (!ok) throw Error(ErrorCode::OutOfRange, "bounding box outside the volume");
}

}  // namespace lnq
