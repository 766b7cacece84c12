#include "lnq/volgrid/volume.hpp"

#include <algorithm>
#include <string>

namespace lnq {

std::string_view to_string(VolumeKind kind) noexcept {
  switch (kind) {
    case VolumeKind::intensity: return "intensity";
    case VolumeKind::label: return "label";
    case VolumeKind::tristate: return "tristate";
  }
  return "intensity";
}

VolumeKind volume_kind_from_string(std::string_view name) {
  if (name == "intensity") return VolumeKind::intensity;
  if (name == "label") return VolumeKind::label;
  if (name == "tristate") return VolumeKind::tristate;
  throw Error(ErrorCode::InvalidArgument, "unknown volume kind '" + std::string(name) + "'");
}

void Geometry::validate() const {
  if (dims.z < 1 || dims.y < 1 || dims.x < 1) {
    throw Error(ErrorCode::InvalidArgument, "dims must be >= 1 on every axis");
  }
  if (!(spacing.z > 0.0) || !(spacing.y > 0.0) || !(spacing.x > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "spacing must be > 0 on every axis");
  }
}

void require_same_shape(const Geometry& a, const Geometry& b, std::string_view what) {
  if (!same_shape(a, b)) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": volumes differ in dims");
  }
}

std::size_t count_nonzero(const LabelMap& mask) noexcept {
  const auto d = mask.data();
  return static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](auto v) { return v != 0; }));
}

void require_binary(const LabelMap& mask, std::string_view what) {
  const auto d = mask.data();
  if (std::any_of(d.begin(), d.end(), [](auto v) { return v > 1; })) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": mask is not binary");
  }
}

}  // namespace lnq
