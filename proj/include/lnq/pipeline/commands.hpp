#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lnq/pipeline/config.hpp"
#include "lnq/pipeline/table.hpp"

namespace lnq {

namespace fs = std::filesystem;

/// A path naming a case directory is returned as is; otherwise its
/// subdirectories that hold an `image/` folder, sorted by name.
[[nodiscard]] std::vector<fs::path> discover_cases(const fs::path& path);

/// The volume file of a case subfolder such as `image/`. Prefers `.nii.gz`,
/// then `.nii`, then a raw sidecar. Returns an empty path when none exists.
[[nodiscard]] fs::path find_volume(const fs::path& dir);

/// Resample, ROI crop and clip/standardize one case into `<case>/derived/`.
/// Returns the supervision rows raw, roi_crop and pseudo_label, which are
/// also written to `derived/voxel_stats`. Failures name the stage.
Table cmd_preprocess(const fs::path& case_dir, const PipelineConfig& config);

/// Builds the training pair of one strategy from a preprocessed case into
/// `derived/<strategy>/`. Returns one stats row.
Table cmd_strategy(const fs::path& case_dir, Strategy strategy, const PipelineConfig& config);

/// Scores every `<case>` volume of `gt_dir` against the same file name in
/// `pred_dir` and writes `cases`, `cohort` and `overlap` reports to `out_dir`.
/// Returns the cohort table.
Table cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& out_dir,
               const std::string& model, const PipelineConfig& config);

/// Pairwise Wilcoxon tests of per-case reports (`cases.tsv`/`.jsonl`).
/// With `out_dir` set the square p-value matrices of dice and assd are
/// written there as `wilcoxon_dice` and `wilcoxon_assd`.
Table cmd_compare(const std::vector<fs::path>& reports, const std::vector<std::string>& names,
                  const fs::path& out_dir, const PipelineConfig& config);

/// Component statistics of each labeled dataset directory. With `out_dir`
/// set, `datasets` and `histogram` reports are written there.
Table cmd_stats(const std::vector<fs::path>& datasets, const fs::path& out_dir, const PipelineConfig& config);

/// Component catalog of one label volume.
Table cmd_measure(const fs::path& labels, const PipelineConfig& config);

/// Removes components below the filter threshold. Returns one row with the
/// component counts before and after.
Table cmd_postprocess(const fs::path& in, const fs::path& out, const PipelineConfig& config);

/// Renders a phantom spec (single case or cohort) below `out_dir`: case
/// directories in `cases/`, plus `ground-truth/` and `predictions/<model>/`.
Table cmd_phantom(const fs::path& spec_file, const fs::path& out_dir, const PipelineConfig& config);

}  // namespace lnq
