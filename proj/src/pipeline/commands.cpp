#include "lnq/pipeline/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "lnq/evalkit/cohort.hpp"
#include "lnq/measure/stats.hpp"
#include "lnq/morph3d/bbox.hpp"
#include "lnq/morph3d/components.hpp"
#include "lnq/pipeline/batch.hpp"
#include "lnq/pipeline/phantom.hpp"
#include "lnq/volgrid/intensity.hpp"
#include "lnq/volgrid/io.hpp"
#include "lnq/volgrid/resample.hpp"

namespace lnq {
namespace {

using json = nlohmann::ordered_json;

bool is_volume_file(const fs::path& p) {
  const auto name = p.filename().string();
  auto ends_with = [&](std::string_view s) { return name.size() > s.size() && name.ends_with(s); };
  return ends_with(".nii.gz") || ends_with(".nii") || ends_with(".json");
}

// File name minus the volume extension.
std::string volume_stem(const fs::path& p) {
  auto name = p.filename().string();
  for (std::string_view ext : {".nii.gz", ".nii", ".json", ".raw"}) {
    if (name.size() > ext.size() && name.ends_with(ext)) return name.substr(0, name.size() - ext.size());
  }
  return name;
}

// Volumes directly inside `dir`, one per stem, sorted by stem.
std::map<std::string, fs::path> volumes_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  auto rank = [](const fs::path& p) {
    const auto n = p.filename().string();
    return n.ends_with(".nii.gz") ? 0 : n.ends_with(".nii") ? 1 : 2;
  };
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || !is_volume_file(e.path())) continue;
    const auto stem = volume_stem(e.path());
    auto [it, inserted] = out.emplace(stem, e.path());
    if (!inserted && rank(e.path()) < rank(it->second)) it->second = e.path();
  }
  return out;
}

std::string case_id_of(const fs::path& case_dir) {
  auto p = case_dir;
  if (!p.has_filename()) p = p.parent_path();
  return p.filename().string();
}

// Runs one pipeline stage, tagging any failure with the case and stage name.
template <typename Fn>
auto stage(const std::string& command, const std::string& case_id, const char* name, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), command + " " + case_id + ": stage '" + name + "' failed: " + e.what());
  }
}

fs::path required_volume(const fs::path& dir, const char* what) {
  auto p = find_volume(dir);
  if (p.empty()) throw Error(ErrorCode::Io, std::string("missing ") + what + " volume in " + dir.string());
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

Table stats_table() {
  return Table{{"case_id", "stage", "total_voxels", "labeled_voxels", "ratio_percent"}, {}};
}

void add_stats_row(Table& t, const std::string& case_id, const std::string& stage_name, const VoxelStats& s) {
  t.add_row({case_id, stage_name, static_cast<std::int64_t>(s.total_voxels),
             static_cast<std::int64_t>(s.labeled_voxels), s.ratio_percent});
}

LabelMap binarize(const LabelMap& labels) {
  LabelMap out = blank_mask(labels);
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] != 0 ? 1 : 0;
  return out;
}

std::vector<CaseMetrics> metrics_from_report(const fs::path& report) {
  std::vector<CaseMetrics> out;
  for (const auto& r : read_table(report)) {
    auto field = [&](const char* key) -> const std::string& {
      const auto it = r.find(key);
      if (it == r.end()) throw Error(ErrorCode::CorruptFile, report.string() + " has no '" + key + "' column");
      return it->second;
    };
    CaseMetrics m;
    m.case_id = field("case_id");
    try {
      m.dice = std::stod(field("dice"));
      m.assd_mm = std::stod(field("assd_mm"));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::CorruptFile, report.string() + ": bad number in case " + m.case_id);
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

std::vector<fs::path> discover_cases(const fs::path& path) {
  if (fs::is_directory(path / "image")) return {path};
  if (!fs::is_directory(path)) throw Error(ErrorCode::Io, "not a directory: " + path.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_directory() && fs::is_directory(e.path() / "image")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no case directories found in " + path.string());
  return out;
}

fs::path find_volume(const fs::path& dir) {
  if (!fs::is_directory(dir)) return {};
  const auto all = volumes_in(dir);
  return all.empty() ? fs::path{} : all.begin()->second;
}

Table cmd_preprocess(const fs::path& case_dir, const PipelineConfig& config) {
  config.validate();
  const auto id = case_id_of(case_dir);
  const std::string cmd = "preprocess";

  struct Inputs {
    Image image;
    LabelMap weak;
    std::optional<LabelMap> anatomy;
    std::optional<LabelMap> full;
  };
  auto in = stage(cmd, id, "load", [&] {
    Inputs r{read_image(required_volume(case_dir / "image", "image")),
             read_label_map(required_volume(case_dir / "labels-weak", "weak label")), std::nullopt, std::nullopt};
    if (auto p = find_volume(case_dir / "anatomy"); !p.empty()) r.anatomy = read_label_map(p);
    if (auto p = find_volume(case_dir / "labels-full"); !p.empty()) r.full = read_label_map(p);
    require_same_shape(r.image.geometry(), r.weak.geometry(), "image vs weak labels");
    if (r.anatomy) require_same_shape(r.image.geometry(), r.anatomy->geometry(), "image vs anatomy");
    if (r.full) require_same_shape(r.image.geometry(), r.full->geometry(), "image vs full labels");
    return r;
  });

  stage(cmd, id, "resample", [&] {
    const auto& t = config.target_spacing;
    in.image = resample(in.image, t, Interpolation::trilinear);
    in.weak = resample(binarize(in.weak), t);
    if (in.anatomy) in.anatomy = resample(*in.anatomy, t);
    if (in.full) in.full = resample(binarize(*in.full), t);
    return 0;
  });

  Table stats = stats_table();
  add_stats_row(stats, id, "raw", voxel_stats(from_weak_labels(in.weak)));

  std::optional<BoundingBox> roi;
  stage(cmd, id, "roi_crop", [&] {
    if (!in.anatomy) return 0;
    LabelMap lungs = blank_mask(*in.anatomy);
    const std::set<std::uint8_t> wanted(config.lung_labels.begin(), config.lung_labels.end());
    for (std::size_t i = 0; i < lungs.size(); ++i) lungs[i] = wanted.contains((*in.anatomy)[i]) ? 1 : 0;
    // Without lung labels there is no ROI; the case is kept whole.
    if (count_nonzero(lungs) == 0) return 0;
    roi = bounding_box_of(lungs, config.roi_margin_mm);
    in.image = crop(in.image, *roi);
    in.weak = crop(in.weak, *roi);
    in.anatomy = crop(*in.anatomy, *roi);
    if (in.full) in.full = crop(*in.full, *roi);
    return 0;
  });
  const auto weak_state = from_weak_labels(in.weak);
  add_stats_row(stats, id, "roi_crop", voxel_stats(weak_state));

  const auto pseudo = stage(cmd, id, "pseudo_label", [&] {
    return in.anatomy ? strategy_pseudo_labeling(weak_state, *in.anatomy, config.pseudo_label_subset) : weak_state;
  });
  add_stats_row(stats, id, "pseudo_label", voxel_stats(pseudo));

  const auto standardized = stage(cmd, id, "standardize", [&] {
    return clip_and_standardize(in.image, IntensityWindow(config.window_lo, config.window_hi));
  });

  stage(cmd, id, "write", [&] {
    const auto out = case_dir / case_layout::kDerived;
    fs::create_directories(out);
    write_volume(standardized, out / "image.nii.gz");
    write_volume(in.weak, out / "weak.nii.gz");
    write_volume(weak_state.codes(), out / "annotation.nii.gz");
    if (in.anatomy) write_volume(*in.anatomy, out / "anatomy.nii.gz");
    if (in.full) write_volume(*in.full, out / "full.nii.gz");
    json prov{{"command", cmd},
              {"case_id", id},
              {"target_spacing", {config.target_spacing.z, config.target_spacing.y, config.target_spacing.x}},
              {"window", {config.window_lo, config.window_hi}},
              {"roi", nullptr}};
    if (roi) {
      prov["roi"] = {{"lo", {roi->lo.z, roi->lo.y, roi->lo.x}},
                     {"hi", {roi->hi.z, roi->hi.y, roi->hi.x}},
                     {"margin_mm", roi->margin_mm}};
    }
    write_text(out / "preprocess.json", prov.dump(2) + "\n");
    write_table(out / "voxel_stats", stats, config.format);
    return 0;
  });
  return stats;
}

Table cmd_strategy(const fs::path& case_dir, Strategy strategy, const PipelineConfig& config) {
  config.validate();
  const auto id = case_id_of(case_dir);
  const auto derived = case_dir / case_layout::kDerived;
  const std::string cmd = "strategy";
  const std::string name(to_string(strategy));

  if (!fs::exists(derived / "weak.nii.gz")) {
    throw Error(ErrorCode::Io, cmd + " " + id + ": case is not preprocessed (no " + (derived / "weak.nii.gz").string() + ")");
  }
  const auto state = stage(cmd, id, "load", [&] { return from_weak_labels(read_label_map(derived / "weak.nii.gz")); });

  const auto result = stage(cmd, id, name.c_str(), [&] {
    switch (strategy) {
      case Strategy::noisy_label: return strategy_noisy_label(state);
      case Strategy::loss_masking: return strategy_loss_masking(state);
      case Strategy::instance_coating:
        return strategy_instance_coating(state, config.coating_margin_voxels, config.connectivity);
      case Strategy::pseudo_labeling: {
        if (!fs::exists(derived / "anatomy.nii.gz")) {
          throw Error(ErrorCode::Io, "pseudo labeling needs anatomy; none was preprocessed");
        }
        return strategy_pseudo_labeling(state, read_label_map(derived / "anatomy.nii.gz"),
                                        config.pseudo_label_subset);
      }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown strategy");
  });

  const auto s = voxel_stats(result);
  Table t{{"case_id", "strategy", "total_voxels", "labeled_voxels", "ratio_percent", "foreground", "background",
           "unknown"},
          {}};
  t.add_row({id, name, static_cast<std::int64_t>(s.total_voxels), static_cast<std::int64_t>(s.labeled_voxels),
             s.ratio_percent, static_cast<std::int64_t>(result.count(Supervision::foreground)),
             static_cast<std::int64_t>(result.count(Supervision::background)),
             static_cast<std::int64_t>(result.count(Supervision::unknown))});

  stage(cmd, id, "write", [&] {
    const auto out = derived / name;
    fs::create_directories(out);
    const auto pair = export_training_pair(result);
    write_volume(pair.target, out / "target.nii.gz");
    write_volume(pair.loss_mask, out / "loss_mask.nii.gz");
    write_volume(result.codes(), out / "annotation.nii.gz");
    json prov{{"command", cmd},
              {"case_id", id},
              {"strategy", name},
              {"input", "weak.nii.gz"},
              {"coating_margin_voxels", config.coating_margin_voxels},
              {"connectivity", static_cast<int>(config.connectivity)},
              {"pseudo_label_subset", config.pseudo_label_subset}};
    write_text(out / "provenance.json", prov.dump(2) + "\n");
    write_table(out / "stats", t, config.format);
    return 0;
  });
  return t;
}

Table cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& out_dir, const std::string& model,
               const PipelineConfig& config) {
  config.validate();
  const auto gts = volumes_in(gt_dir);
  if (gts.empty()) throw Error(ErrorCode::EmptyInput, "no ground-truth volumes in " + gt_dir.string());
  const auto preds = volumes_in(pred_dir);
  std::vector<std::pair<std::string, fs::path>> cases(gts.begin(), gts.end());
  for (const auto& [id, _] : cases) {
    if (!preds.contains(id)) throw Error(ErrorCode::Io, "no prediction for case " + id + " in " + pred_dir.string());
  }

  struct CaseResult {
    CaseMetrics metrics;
    OverlapAnalysis overlaps;
  };
  const auto results = run_batch(cases, config.workers, [&](const std::pair<std::string, fs::path>& c) {
    try {
      auto pred = binarize(read_label_map(preds.at(c.first)));
      const auto gt = binarize(read_label_map(c.second));
      if (config.postprocess_before_eval) {
        pred = postprocess_filter(pred, config.filter_min_short_diameter_mm, config.connectivity);
      }
      return CaseResult{evaluate_case(c.first, pred, gt), component_overlaps(pred, gt, config.connectivity)};
    } catch (const Error& e) {
      throw Error(e.code(), "eval " + c.first + ": " + e.what());
    }
  });

  std::vector<CaseMetrics> metrics;
  std::vector<OverlapAnalysis> overlaps;
  for (const auto& r : results) {
    metrics.push_back(r.metrics);
    overlaps.push_back(r.overlaps);
  }

  Table cases_t{{"case_id", "dice", "assd_mm", "assd_fallback"}, {}};
  for (const auto& m : metrics) cases_t.add_row({m.case_id, m.dice, m.assd_mm, m.assd_fallback_used});

  const auto report = cohort_report(metrics);
  Table cohort_t{{"model", "cases", "dice_mean", "dice_std", "assd_mean_mm", "assd_std_mm", "assd_fallbacks"}, {}};
  cohort_t.add_row({model, static_cast<std::int64_t>(report.cases), report.dice.mean, report.dice.std,
                    report.assd_mm.mean, report.assd_mm.std, static_cast<std::int64_t>(report.assd_fallbacks)});

  const auto [gt_curve, pred_curve] = cohort_overlap_curves(overlaps, config.bin_width_mm);
  Table overlap_t{{"model", "direction", "bin_lo_mm", "bin_hi_mm", "mean", "n"}, {}};
  for (const auto* curve : {&gt_curve, &pred_curve}) {
    for (const auto& b : curve->bins) {
      overlap_t.add_row({model, std::string(to_string(curve->direction)), b.lo_mm, b.hi_mm, b.mean_overlap,
                         static_cast<std::int64_t>(b.n)});
    }
  }

  fs::create_directories(out_dir);
  write_table(out_dir / "cases", cases_t, config.format);
  write_table(out_dir / "cohort", cohort_t, config.format);
  write_table(out_dir / "overlap", overlap_t, config.format);
  return cohort_t;
}

Table cmd_compare(const std::vector<fs::path>& reports, const std::vector<std::string>& names,
                  const fs::path& out_dir, const PipelineConfig& config) {
  if (reports.size() < 2) throw Error(ErrorCode::InvalidArgument, "compare needs at least two reports");
  if (!names.empty() && names.size() != reports.size()) {
    throw Error(ErrorCode::LengthMismatch, "one name per report expected");
  }
  std::vector<std::string> labels = names;
  if (labels.empty()) {
    for (const auto& r : reports) labels.push_back(fs::absolute(r).parent_path().filename().string());
  }
  std::vector<std::vector<CaseMetrics>> data;
  for (const auto& r : reports) data.push_back(metrics_from_report(r));

  const auto n = reports.size();
  std::vector<std::vector<PairedComparison>> cmp(n, std::vector<PairedComparison>(n));
  Table t{{"a", "b", "metric", "n", "statistic", "p_two_sided", "method"}, {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      cmp[i][j] = compare_reports(data[i], data[j]);
      cmp[j][i] = cmp[i][j];
      for (const auto& [metric, w] : {std::pair{"dice", cmp[i][j].dice}, std::pair{"assd_mm", cmp[i][j].assd}}) {
        t.add_row({labels[i], labels[j], std::string(metric), static_cast<std::int64_t>(w.n_effective), w.statistic,
                   w.p_two_sided, std::string(to_string(w.method))});
      }
    }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_table(out_dir / "comparison", t, config.format);
    for (const bool is_dice : {true, false}) {
      Table m;
      m.columns.push_back("model");
      for (const auto& l : labels) m.columns.push_back(l);
      m.columns.push_back("mean");
      m.columns.push_back("std");
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<Cell> row{labels[i]};
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) {
            row.emplace_back(std::string("-"));
          } else {
            row.emplace_back(is_dice ? cmp[i][j].dice.p_two_sided : cmp[i][j].assd.p_two_sided);
          }
        }
        const auto r = cohort_report(data[i]);
        const auto& ms = is_dice ? r.dice : r.assd_mm;
        row.emplace_back(ms.mean);
        row.emplace_back(ms.std);
        m.add_row(std::move(row));
      }
      write_table(out_dir / (is_dice ? "wilcoxon_dice" : "wilcoxon_assd"), m, config.format);
    }
  }
  return t;
}

Table cmd_stats(const std::vector<fs::path>& datasets, const fs::path& out_dir, const PipelineConfig& config) {
  config.validate();
  Table t{{"dataset", "volumes", "ln_components", "enlarged_components"}, {}};
  Table h{{"dataset", "bin_lo_mm", "bin_hi_mm", "count"}, {}};
  const EnlargementRule rule{config.enlargement_threshold_mm};
  for (const auto& dir : datasets) {
    std::vector<fs::path> files;
    for (const auto& [_, p] : volumes_in(dir)) files.push_back(p);
    if (files.empty()) throw Error(ErrorCode::EmptyInput, "no label volumes in " + dir.string());
    const auto per_volume = run_batch(files, config.workers, [&](const fs::path& p) {
      std::vector<LabelMap> one;
      one.push_back(read_label_map(p));
      return dataset_ln_stats(one, rule, config.connectivity);
    });
    DatasetLnStats s;
    for (const auto& v : per_volume) {
      s.volumes += v.volumes;
      s.components += v.components;
      s.enlarged_components += v.enlarged_components;
      s.diameters_mm.insert(s.diameters_mm.end(), v.diameters_mm.begin(), v.diameters_mm.end());
    }
    const auto name = fs::absolute(dir).lexically_normal().filename().string().empty()
                          ? fs::absolute(dir).lexically_normal().parent_path().filename().string()
                          : fs::absolute(dir).lexically_normal().filename().string();
    t.add_row({name, static_cast<std::int64_t>(s.volumes), static_cast<std::int64_t>(s.components),
               static_cast<std::int64_t>(s.enlarged_components)});
    for (const auto& b : diameter_histogram(s.diameters_mm, config.bin_width_mm)) {
      h.add_row({name, b.lo_mm, b.hi_mm, static_cast<std::int64_t>(b.count)});
    }
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_table(out_dir / "datasets", t, config.format);
    write_table(out_dir / "histogram", h, config.format);
  }
  return t;
}

Table cmd_measure(const fs::path& labels, const PipelineConfig& config) {
  config.validate();
  const auto mask = binarize(read_label_map(labels));
  auto set = connected_components(mask, config.connectivity);
  const auto m = measure_components(set);
  const EnlargementRule rule{config.enlargement_threshold_mm};
  Table t{{"component_id", "voxel_count", "volume_mm3", "shortest_diameter_mm", "slice_index", "long_axis_mm",
           "enlarged", "bbox_lo_z", "bbox_lo_y", "bbox_lo_x", "bbox_hi_z", "bbox_hi_y", "bbox_hi_x"},
          {}};
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& c = set.components[i];
    const auto b = component_bounds(c);
    t.add_row({static_cast<std::int64_t>(c.id), static_cast<std::int64_t>(c.voxels.size()), c.volume_mm3,
               m[i].shortest_diameter_mm, m[i].slice_index, m[i].long_axis_mm, classify_enlarged(m[i], rule), b.lo.z,
               b.lo.y, b.lo.x, b.hi.z, b.hi.y, b.hi.x});
  }
  return t;
}

Table cmd_postprocess(const fs::path& in, const fs::path& out, const PipelineConfig& config) {
  config.validate();
  const auto pred = binarize(read_label_map(in));
  const auto filtered = postprocess_filter(pred, config.filter_min_short_diameter_mm, config.connectivity);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_volume(filtered, out);
  Table t{{"input", "components_in", "components_out", "voxels_in", "voxels_out"}, {}};
  t.add_row({volume_stem(in), static_cast<std::int64_t>(connected_components(pred, config.connectivity).size()),
             static_cast<std::int64_t>(connected_components(filtered, config.connectivity).size()),
             static_cast<std::int64_t>(count_nonzero(pred)), static_cast<std::int64_t>(count_nonzero(filtered))});
  return t;
}

Table cmd_phantom(const fs::path& spec_file, const fs::path& out_dir, const PipelineConfig& config) {
  const auto file = load_phantom_file(spec_file);
  std::set<std::string> ids;
  for (const auto& s : file.cases) {
    if (!ids.insert(s.case_id).second) throw Error(ErrorCode::InvalidArgument, "duplicate case id " + s.case_id);
  }
  fs::create_directories(out_dir / "cases");
  const auto rows = run_batch(file.cases, config.workers, [&](const PhantomSpec& spec) {
    const auto phantom = render_phantom(spec);
    write_phantom_case(phantom, out_dir / "cases" / spec.case_id, out_dir);
    const auto annotated = std::count_if(spec.nodes.begin(), spec.nodes.end(), [](const auto& n) { return n.annotated; });
    return std::vector<Cell>{spec.case_id, static_cast<std::int64_t>(spec.nodes.size()),
                             static_cast<std::int64_t>(annotated),
                             static_cast<std::int64_t>(connected_components(phantom.full_labels, config.connectivity).size()),
                             static_cast<std::int64_t>(connected_components(phantom.weak_labels, config.connectivity).size())};
  });
  Table t{{"case_id", "nodes", "annotated", "gt_components", "weak_components"}, {}};
  for (auto r : rows) t.add_row(std::move(r));
  return t;
}

}  // namespace lnq
