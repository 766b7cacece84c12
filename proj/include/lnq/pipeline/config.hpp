#pragma once

#include <filesystem>
#include <vector>

#include "lnq/morph3d/connectivity.hpp"
#include "lnq/pipeline/table.hpp"
#include "lnq/weaklab/annotation.hpp"

namespace lnq {

/// Settings shared by every subcommand.
struct PipelineConfig {
  Vec3 target_spacing{3.0, 0.93, 0.93};
  double window_lo = -150.0;
  double window_hi = 350.0;
  int coating_margin_voxels = 1;
  Connectivity connectivity = Connectivity::twentysix;
  double filter_min_short_diameter_mm = 9.5;
  double bin_width_mm = 2.5;
  double enlargement_threshold_mm = 10.0;

  /// Anatomy labels whose union defines the crop ROI (lung lobes).
  std::vector<std::uint8_t> lung_labels{13, 14, 15, 16, 17};
  double roi_margin_mm = 0.0;
  /// Anatomy labels counted as background evidence; empty = all.
  AnatomySubset pseudo_label_subset;
  /// Apply the small-component filter to predictions before scoring.
  bool postprocess_before_eval = false;

  int workers = 1;
  ReportFormat format = ReportFormat::table;

  /// Throws InvalidArgument on non-positive sizes or an inverted window.
  void validate() const;
};

/// Reads a JSON config; missing keys keep their defaults, unknown keys are
/// rejected.
[[nodiscard]] PipelineConfig load_config(const std::filesystem::path& path);
[[nodiscard]] PipelineConfig config_from_json_text(const std::string& text);
[[nodiscard]] std::string config_to_json_text(const PipelineConfig& config);

}  // namespace lnq
