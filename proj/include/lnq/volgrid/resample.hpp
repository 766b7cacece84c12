#pragma once

#include "lnq/volgrid/volume.hpp"

namespace lnq {

enum class Interpolation { nearest, trilinear };

/// Output dims for resampling `g` onto `target_spacing`:
/// round(dims * spacing / target) per axis, at least 1.
[[nodiscard]] Index3 resampled_dims(const Geometry& g, const Vec3& target_spacing);

/// Resamples onto a lattice with `target_spacing` whose physical extent starts
/// at the same corner as the input's. Output voxel i samples the input at
/// continuous index (i + 0.5) * target / source - 0.5, clamped to the edge.
///
/// Label and tristate volumes only support nearest interpolation.
[[nodiscard]] Image resample(const Image& image, const Vec3& target_spacing, Interpolation mode);
[[nodiscard]] LabelMap resample(const LabelMap& labels, const Vec3& target_spacing,
                                Interpolation mode = Interpolation::nearest);

}  // namespace lnq
