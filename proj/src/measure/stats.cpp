#include "lnq/measure/stats.hpp"

#include <cmath>

namespace lnq {

std::vector<HistogramBin> diameter_histogram(std::span<const double> diameters_mm, double bin_width_mm) {
  if (!(bin_width_mm > 0.0)) throw Error(ErrorCode::InvalidArgument, "bin width must be > 0");
  std::vector<HistogramBin> bins;
  for (const double d : diameters_mm) {
    if (!(d >= 0.0)) throw Error(ErrorCode::InvalidArgument, "diameters must be >= 0");
    const auto k = static_cast<std::size_t>(std::floor(d / bin_width_mm));
    while (bins.size() <= k) {
      const auto b = static_cast<double>(bins.size());
      bins.push_back({b * bin_width_mm, (b + 1.0) * bin_width_mm, 0});
    }
    ++bins[k].count;
  }
  return bins;
}

std::vector<HistogramBin> diameter_histogram(const ComponentSet& set, double bin_width_mm) {
  std::vector<double> d;
  d.reserve(set.size());
  for (const auto& c : set.components) {
    d.push_back(c.shortest_diameter_mm ? *c.shortest_diameter_mm
                                       : shortest_diameter(c, set.geometry.spacing).shortest_diameter_mm);
  }
  return diameter_histogram(d, bin_width_mm);
}

DatasetLnStats dataset_ln_stats(std::span<const LabelMap> label_volumes, const EnlargementRule& rule,
                                Connectivity connectivity) {
  DatasetLnStats s;
  for (const auto& labels : label_volumes) {
    // Labels are read as semantic maps: any non-zero value is lymph node.
    LabelMap binary = blank_mask(labels);
    for (std::size_t i = 0; i < labels.size(); ++i) binary[i] = labels[i] != 0 ? 1 : 0;
    auto set = connected_components(binary, connectivity);
    ++s.volumes;
    s.components += set.size();
    for (const auto& m : measure_components(set)) {
      s.diameters_mm.push_back(m.shortest_diameter_mm);
      if (classify_enlarged(m, rule)) ++s.enlarged_components;
    }
  }
  return s;
}

}  // namespace lnq
