#pragma once

#include <filesystem>
#include <variant>

#include "lnq/volgrid/volume.hpp"

namespace lnq {

/// On-disk encodings understood by read/write.
///
/// * `nifti`      single-file NIfTI-1 (`.nii`), 348-byte header.
/// * `nifti_gz`   the same, gzip-compressed (`.nii.gz`).
/// * `raw`        little-endian payload (`.raw`) next to a JSON sidecar
///                (`.json`) holding dims/spacing/origin/kind/dtype. Either
///                file of the pair may be named. Layout is in docs/volume-format.md.
enum class VolumeFormat { nifti, nifti_gz, raw };

/// Picks the format from the file extension; throws UnsupportedFormat.
VolumeFormat format_from_path(const std::filesystem::path& path);

/// An intensity volume or an integer label/tristate volume, as stored.
using AnyVolume = std::variant<Image, LabelMap>;

/// Reads any supported file. Intensity data comes back as Image, label and
/// tristate data as LabelMap.
AnyVolume read_volume(const std::filesystem::path& path);

/// Reads a file and converts it to float intensities regardless of kind.
Image read_image(const std::filesystem::path& path);

/// Reads a file whose voxels are non-negative integers <= 255. Files stored
/// as intensity are accepted when every value is integral; kind is then
/// reported as `label`.
LabelMap read_label_map(const std::filesystem::path& path);

/// Writes float32 data. The parent directory must exist.
void write_volume(const Image& image, const std::filesystem::path& path);
/// Writes uint8 data tagged with the volume's kind.
void write_volume(const LabelMap& labels, const std::filesystem::path& path);

}  // namespace lnq
