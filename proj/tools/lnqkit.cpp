// lnqkit: command-line front end of the lnq toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 internal failure.

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "lnq/pipeline/batch.hpp"
#include "lnq/pipeline/commands.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

// Flag overrides shared by every subcommand; unset ones keep the config value.
struct Overrides {
  std::string config_file;
  std::optional<int> workers;
  std::optional<std::string> format;
  std::vector<double> target_spacing;
  std::vector<double> window;
  std::optional<int> coating_margin;
  std::optional<int> connectivity;
  std::optional<double> filter_mm;
  std::optional<double> bin_width_mm;
  std::optional<double> enlarge_mm;
  bool postprocess_before_eval = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--workers", workers, "parallel cases")->check(CLI::PositiveNumber);
    app->add_option("--format", format, "report format: table or json-lines");
    app->add_option("--target-spacing", target_spacing, "z y x spacing in mm")->expected(3);
    app->add_option("--window", window, "intensity window lo hi in HU")->expected(2);
    app->add_option("--coating-margin", coating_margin, "coating hull in voxels");
    app->add_option("--connectivity", connectivity, "6, 18 or 26");
    app->add_option("--filter-mm", filter_mm, "minimum shortest diameter kept by postprocess");
    app->add_option("--bin-width", bin_width_mm, "diameter bin width in mm");
    app->add_option("--enlarge-mm", enlarge_mm, "enlargement threshold in mm");
    app->add_flag("--postprocess-before-eval", postprocess_before_eval, "filter predictions before scoring");
  }

  [[nodiscard]] lnq::PipelineConfig resolve() const {
    auto c = config_file.empty() ? lnq::PipelineConfig{} : lnq::load_config(config_file);
    if (workers) c.workers = *workers;
    if (format) c.format = lnq::report_format_from_string(*format);
    if (!target_spacing.empty()) c.target_spacing = {target_spacing[0], target_spacing[1], target_spacing[2]};
    if (!window.empty()) {
      c.window_lo = window[0];
      c.window_hi = window[1];
    }
    if (coating_margin) c.coating_margin_voxels = *coating_margin;
    if (connectivity) c.connectivity = lnq::connectivity_from_int(*connectivity);
    if (filter_mm) c.filter_min_short_diameter_mm = *filter_mm;
    if (bin_width_mm) c.bin_width_mm = *bin_width_mm;
    if (enlarge_mm) c.enlargement_threshold_mm = *enlarge_mm;
    if (postprocess_before_eval) c.postprocess_before_eval = true;
    c.validate();
    return c;
  }
};

void append(lnq::Table& into, lnq::Table&& from) {
  if (into.columns.empty()) into.columns = std::move(from.columns);
  for (auto& r : from.rows) into.rows.push_back(std::move(r));
}

std::vector<fs::path> all_cases(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    auto found = lnq::discover_cases(a);
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lymph node segmentation toolkit: preprocessing, weak-label strategies, measurement, evaluation"};
  app.require_subcommand(1);
  Overrides ov;
  lnq::Table result;

  auto* pre = app.add_subcommand("preprocess", "resample, crop and standardize case directories");
  std::vector<std::string> pre_cases;
  pre->add_option("cases", pre_cases, "case directories or folders of cases")->required();
  ov.attach(pre);

  auto* strat = app.add_subcommand("strategy", "build training pairs from preprocessed cases");
  std::string strat_name;
  std::vector<std::string> strat_cases;
  strat->add_option("strategy", strat_name, "noisy, mask, coat or pseudo")->required();
  strat->add_option("cases", strat_cases, "case directories or folders of cases")->required();
  ov.attach(strat);

  auto* ev = app.add_subcommand("eval", "score predictions against ground truth");
  std::string pred_dir, gt_dir, eval_out, model;
  ev->add_option("--pred", pred_dir, "prediction directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--gt", gt_dir, "ground-truth directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--out", eval_out, "report directory")->required();
  ev->add_option("--model", model, "model tag (default: prediction directory name)");
  ov.attach(ev);

  auto* cmp = app.add_subcommand("compare", "paired Wilcoxon tests between per-case reports");
  std::vector<std::string> cmp_reports, cmp_names;
  std::string cmp_out;
  cmp->add_option("reports", cmp_reports, "cases reports from eval")->required()->check(CLI::ExistingFile);
  cmp->add_option("--names", cmp_names, "one label per report")->delimiter(',');
  cmp->add_option("--out", cmp_out, "directory for the comparison and p-value matrices");
  ov.attach(cmp);

  auto* st = app.add_subcommand("stats", "lymph node statistics per labeled dataset");
  std::vector<std::string> st_dirs;
  std::string st_out;
  st->add_option("datasets", st_dirs, "directories of label volumes")->required()->check(CLI::ExistingDirectory);
  st->add_option("--out", st_out, "directory for the dataset and histogram reports");
  ov.attach(st);

  auto* ms = app.add_subcommand("measure", "component catalog of a label volume");
  std::string ms_in;
  ms->add_option("labels", ms_in, "label volume")->required()->check(CLI::ExistingFile);
  ov.attach(ms);

  auto* pp = app.add_subcommand("postprocess", "drop components below the diameter threshold");
  std::string pp_in, pp_out;
  pp->add_option("input", pp_in, "prediction volume or directory")->required()->check(CLI::ExistingPath);
  pp->add_option("output", pp_out, "output volume or directory")->required();
  ov.attach(pp);

  auto* ph = app.add_subcommand("phantom", "render synthetic cases from a seeded spec");
  std::string ph_spec, ph_out;
  ph->add_option("spec", ph_spec, "phantom spec JSON")->required()->check(CLI::ExistingFile);
  ph->add_option("out", ph_out, "output directory")->required();
  ov.attach(ph);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const auto config = ov.resolve();
    if (*pre) {
      for (auto& t : lnq::run_batch(all_cases(pre_cases), config.workers,
                                    [&](const fs::path& c) { return lnq::cmd_preprocess(c, config); })) {
        append(result, std::move(t));
      }
    } else if (*strat) {
      const auto s = lnq::strategy_from_string(strat_name);
      for (auto& t : lnq::run_batch(all_cases(strat_cases), config.workers,
                                    [&](const fs::path& c) { return lnq::cmd_strategy(c, s, config); })) {
        append(result, std::move(t));
      }
    } else if (*ev) {
      if (model.empty()) model = fs::absolute(pred_dir).lexically_normal().filename().string();
      result = lnq::cmd_eval(pred_dir, gt_dir, eval_out, model, config);
    } else if (*cmp) {
      std::vector<fs::path> reports(cmp_reports.begin(), cmp_reports.end());
      result = lnq::cmd_compare(reports, cmp_names, cmp_out, config);
    } else if (*st) {
      std::vector<fs::path> dirs(st_dirs.begin(), st_dirs.end());
      result = lnq::cmd_stats(dirs, st_out, config);
    } else if (*ms) {
      result = lnq::cmd_measure(ms_in, config);
    } else if (*pp) {
      if (fs::is_directory(pp_in)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(pp_in)) {
          const auto n = e.path().filename().string();
          if (e.is_regular_file() && (n.ends_with(".nii.gz") || n.ends_with(".nii"))) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        fs::create_directories(pp_out);
        for (auto& t : lnq::run_batch(files, config.workers, [&](const fs::path& f) {
               return lnq::cmd_postprocess(f, fs::path(pp_out) / f.filename(), config);
             })) {
          append(result, std::move(t));
        }
      } else {
        result = lnq::cmd_postprocess(pp_in, pp_out, config);
      }
    } else if (*ph) {
      result = lnq::cmd_phantom(ph_spec, ph_out, config);
    }
    lnq::write_table(std::cout, result, config.format);
    return 0;
  } catch (const lnq::Error& e) {
    std::cerr << "lnqkit: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "lnqkit: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "lnqkit: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
