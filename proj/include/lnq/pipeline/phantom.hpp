#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lnq/volgrid/volume.hpp"

namespace lnq {

/// Ellipsoidal lymph node, centre in physical mm (same frame as the origin).
struct PhantomNode {
  Vec3 center_mm;
  Vec3 radii_mm;
  bool annotated = false;
};

/// Axis-aligned box standing in for an anatomical structure.
struct PhantomOrgan {
  Index3 lo;  // inclusive
  Index3 hi;  // inclusive
  std::uint8_t label = 1;
  float hu = 40.0f;
};

/// Rule for a simulated segmentation model's prediction: each node whose
/// measured shortest diameter is at least `min_node_diameter_mm` is kept
/// (unless randomly missed), scaled by `radius_scale` and shifted in-plane
/// by up to `max_shift_mm`.
struct SimulatedModel {
  std::string name;
  double min_node_diameter_mm = 0.0;
  double radius_scale = 1.0;
  double miss_probability = 0.0;
  double max_shift_mm = 0.0;
};

/// Seeded description of one synthetic case.
struct PhantomSpec {
  std::string case_id = "case_000";
  Geometry geometry{{32, 64, 64}, {3.0, 0.93, 0.93}, {0.0, 0.0, 0.0}};
  std::uint64_t seed = 0;
  std::vector<PhantomNode> nodes;
  std::vector<PhantomOrgan> organs;
  double noise_std_hu = 20.0;
  float background_hu = -800.0f;
  float node_hu = 60.0f;
  std::vector<SimulatedModel> models;

  /// Throws InvalidArgument if a node centre or organ box leaves the volume.
  void validate() const;
};

/// Parameters from which a whole cohort of PhantomSpecs is drawn.
struct CohortSpec {
  std::uint64_t seed = 0;
  std::size_t count = 10;
  Index3 dims{30, 112, 112};
  Vec3 spacing{2.5, 0.8, 0.8};
  int nodes_min = 2;
  int nodes_max = 6;
  double radius_min_mm = 2.0;
  double radius_max_mm = 10.0;
  double annotated_fraction = 0.4;
  double noise_std_hu = 20.0;
  std::vector<SimulatedModel> models;
};

struct PhantomCase {
  PhantomSpec spec;
  Image image;
  LabelMap full_labels;
  LabelMap weak_labels;
  LabelMap anatomy;
  /// Binary mask of each node, in spec order.
  std::vector<LabelMap> node_masks;
  /// (model name, prediction) in spec order.
  std::vector<std::pair<std::string, LabelMap>> predictions;
};

/// Draws the volumes of a case. Identical specs give identical volumes.
[[nodiscard]] PhantomCase render_phantom(const PhantomSpec& spec);

/// Deterministically expands a cohort description into case specs.
[[nodiscard]] std::vector<PhantomSpec> expand_cohort(const CohortSpec& cohort);

/// A phantom spec file holds either one case or `{"cohort": {...}}`.
struct PhantomFile {
  std::vector<PhantomSpec> cases;
  bool is_cohort = false;
};

[[nodiscard]] PhantomFile load_phantom_file(const std::filesystem::path& path);
[[nodiscard]] PhantomFile parse_phantom_json(const std::string& text);
[[nodiscard]] std::string phantom_spec_to_json_text(const PhantomSpec& spec);

/// Case-directory layout shared by the pipeline commands.
namespace case_layout {
inline constexpr char kImage[] = "image/image.nii.gz";
inline constexpr char kWeak[] = "labels-weak/weak.nii.gz";
inline constexpr char kFull[] = "labels-full/full.nii.gz";
inline constexpr char kAnatomy[] = "anatomy/anatomy.nii.gz";
inline constexpr char kDerived[] = "derived";
}  // namespace case_layout

/// Writes the case directory (image, labels-weak, labels-full, anatomy and
/// the resolved spec) plus `<root>/ground-truth/<id>.nii.gz` and
/// `<root>/predictions/<model>/<id>.nii.gz`.
void write_phantom_case(const PhantomCase& phantom, const std::filesystem::path& case_dir,
                        const std::filesystem::path& root);

}  // namespace lnq
