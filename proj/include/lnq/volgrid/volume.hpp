#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lnq/error.hpp"

namespace lnq {

/// Voxel index or extent, ordered (z, y, x).
struct Index3 {
  std::int64_t z = 0;
  std::int64_t y = 0;
  std::int64_t x = 0;

  friend bool operator==(const Index3&, const Index3&) = default;
  friend auto operator<=>(const Index3&, const Index3&) = default;
};

/// Physical triple in millimetres, ordered (z, y, x).
struct Vec3 {
  double z = 0.0;
  double y = 0.0;
  double x = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

enum class VolumeKind : std::uint8_t { intensity, label, tristate };

std::string_view to_string(VolumeKind kind) noexcept;
VolumeKind volume_kind_from_string(std::string_view name);

/// Lattice description shared by every volume: extent, spacing and origin
/// (physical position of the centre of voxel (0,0,0)).
struct Geometry {
  Index3 dims{1, 1, 1};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{};

  [[nodiscard]] std::size_t voxel_count() const noexcept {
    return static_cast<std::size_t>(dims.z * dims.y * dims.x);
  }
  [[nodiscard]] double voxel_volume_mm3() const noexcept {
    return spacing.z * spacing.y * spacing.x;
  }
  [[nodiscard]] std::size_t offset(std::int64_t z, std::int64_t y, std::int64_t x) const noexcept {
    return static_cast<std::size_t>((z * dims.y + y) * dims.x + x);
  }
  [[nodiscard]] std::size_t offset(const Index3& i) const noexcept { return offset(i.z, i.y, i.x); }
  [[nodiscard]] Index3 index_of(std::size_t offset) const noexcept {
    const auto o = static_cast<std::int64_t>(offset);
    return {o / (dims.y * dims.x), (o / dims.x) % dims.y, o % dims.x};
  }
  [[nodiscard]] bool contains(const Index3& i) const noexcept {
    return i.z >= 0 && i.y >= 0 && i.x >= 0 && i.z < dims.z && i.y < dims.y && i.x < dims.x;
  }
  /// Physical extent along each axis (dims * spacing).
  [[nodiscard]] Vec3 extent_mm() const noexcept {
    return {static_cast<double>(dims.z) * spacing.z, static_cast<double>(dims.y) * spacing.y,
            static_cast<double>(dims.x) * spacing.x};
  }

  /// Throws InvalidArgument unless dims >= 1 and spacing > 0 on every axis.
  void validate() const;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// True when both lattices have identical dims (spacing/origin not compared).
[[nodiscard]] inline bool same_shape(const Geometry& a, const Geometry& b) noexcept {
  return a.dims == b.dims;
}

void require_same_shape(const Geometry& a, const Geometry& b, std::string_view what);

/// Dense 3D array in z-major order (x fastest).
template <typename T>
class Volume {
 public:
  using value_type = T;

  Volume() = default;
  Volume(Geometry geometry, VolumeKind kind, T fill = T{})
      : geometry_(geometry), kind_(kind) {
    geometry_.validate();
    data_.assign(geometry_.voxel_count(), fill);
  }
  Volume(Geometry geometry, VolumeKind kind, std::vector<T> data)
      : geometry_(geometry), kind_(kind), data_(std::move(data)) {
    geometry_.validate();
    if (data_.size() != geometry_.voxel_count()) {
      throw Error(ErrorCode::DimensionMismatch, "payload length does not match dims");
    }
  }

  [[nodiscard]] const Geometry& geometry() const noexcept { return geometry_; }
  [[nodiscard]] const Index3& dims() const noexcept { return geometry_.dims; }
  [[nodiscard]] const Vec3& spacing() const noexcept { return geometry_.spacing; }
  [[nodiscard]] const Vec3& origin() const noexcept { return geometry_.origin; }
  [[nodiscard]] VolumeKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  [[nodiscard]] std::span<const T> data() const noexcept { return data_; }
  [[nodiscard]] std::span<T> data() noexcept { return data_; }
  [[nodiscard]] std::vector<T>&& release() && noexcept { return std::move(data_); }

  [[nodiscard]] T& operator[](std::size_t i) noexcept { return data_[i]; }
  [[nodiscard]] const T& operator[](std::size_t i) const noexcept { return data_[i]; }
  [[nodiscard]] T& at(std::int64_t z, std::int64_t y, std::int64_t x) noexcept {
    return data_[geometry_.offset(z, y, x)];
  }
  [[nodiscard]] const T& at(std::int64_t z, std::int64_t y, std::int64_t x) const noexcept {
    return data_[geometry_.offset(z, y, x)];
  }
  [[nodiscard]] T& at(const Index3& i) noexcept { return data_[geometry_.offset(i)]; }
  [[nodiscard]] const T& at(const Index3& i) const noexcept { return data_[geometry_.offset(i)]; }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  Geometry geometry_{};
  VolumeKind kind_ = VolumeKind::intensity;
  std::vector<T> data_;
};

/// CT intensities (Hounsfield units, or standardized values).
using Image = Volume<float>;
/// Binary masks and small multi-label maps (anatomy labels 1..104).
using LabelMap = Volume<std::uint8_t>;

/// Empty binary mask on the same lattice as `like`.
template <typename T>
[[nodiscard]] LabelMap blank_mask(const Volume<T>& like) {
  return LabelMap(like.geometry(), VolumeKind::label, std::uint8_t{0});
}

[[nodiscard]] std::size_t count_nonzero(const LabelMap& mask) noexcept;

/// Throws InvalidArgument if any voxel is not 0 or 1.
void require_binary(const LabelMap& mask, std::string_view what);

}  // namespace lnq
