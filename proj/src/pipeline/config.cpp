#include "lnq/pipeline/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lnq {
namespace {

using json = nlohmann::json;

std::string format_name(ReportFormat f) { return f == ReportFormat::table ? "table" : "json-lines"; }

}  // namespace

void PipelineConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be > 0");
  };
  positive(target_spacing.z, "target_spacing");
  positive(target_spacing.y, "target_spacing");
  positive(target_spacing.x, "target_spacing");
  if (!(window_lo < window_hi)) throw Error(ErrorCode::InvalidArgument, "window requires lo < hi");
  if (coating_margin_voxels < 1) throw Error(ErrorCode::InvalidArgument, "coating_margin_voxels must be >= 1");
  positive(filter_min_short_diameter_mm, "filter_min_short_diameter_mm");
  positive(bin_width_mm, "bin_width_mm");
  positive(enlargement_threshold_mm, "enlargement_threshold_mm");
  if (roi_margin_mm < 0.0) throw Error(ErrorCode::InvalidArgument, "roi_margin_mm must be >= 0");
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
}

PipelineConfig config_from_json_text(const std::string& text) {
  PipelineConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "target_spacing") {
        const auto s = v.get<std::array<double, 3>>();
        c.target_spacing = {s[0], s[1], s[2]};
      } else if (key == "window") {
        const auto w = v.get<std::array<double, 2>>();
        c.window_lo = w[0];
        c.window_hi = w[1];
      } else if (key == "coating_margin_voxels") {
        c.coating_margin_voxels = v.get<int>();
      } else if (key == "connectivity") {
        c.connectivity = connectivity_from_int(v.get<int>());
      } else if (key == "filter_min_short_diameter_mm") {
        c.filter_min_short_diameter_mm = v.get<double>();
      } else if (key == "bin_width_mm") {
        c.bin_width_mm = v.get<double>();
      } else if (key == "enlargement_threshold_mm") {
        c.enlargement_threshold_mm = v.get<double>();
      } else if (key == "lung_labels") {
        c.lung_labels = v.get<std::vector<std::uint8_t>>();
      } else if (key == "roi_margin_mm") {
        c.roi_margin_mm = v.get<double>();
      } else if (key == "pseudo_label_subset") {
        c.pseudo_label_subset = v.get<std::vector<std::uint8_t>>();
      } else if (key == "postprocess_before_eval") {
        c.postprocess_before_eval = v.get<bool>();
      } else if (key == "workers") {
        c.workers = v.get<int>();
      } else if (key == "format") {
        c.format = report_format_from_string(v.get<std::string>());
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["target_spacing"] = {c.target_spacing.z, c.target_spacing.y, c.target_spacing.x};
  j["window"] = {c.window_lo, c.window_hi};
  j["coating_margin_voxels"] = c.coating_margin_voxels;
  j["connectivity"] = static_cast<int>(c.connectivity);
  j["filter_min_short_diameter_mm"] = c.filter_min_short_diameter_mm;
  j["bin_width_mm"] = c.bin_width_mm;
  j["enlargement_threshold_mm"] = c.enlargement_threshold_mm;
  j["lung_labels"] = c.lung_labels;
  j["roi_margin_mm"] = c.roi_margin_mm;
  j["pseudo_label_subset"] = c.pseudo_label_subset;
  j["postprocess_before_eval"] = c.postprocess_before_eval;
  j["workers"] = c.workers;
  j["format"] = format_name(c.format);
  return j.dump(2);
}

}  // namespace lnq
