#pragma once

#include <span>
#include <vector>

#include "lnq/measure/diameter.hpp"

namespace lnq {

/// Half-open bin [lo, hi).
struct HistogramBin {
  double lo_mm = 0.0;
  double hi_mm = 0.0;
  std::size_t count = 0;
};

/// Bins [k*w, (k+1)*w) from k = 0 up to the last populated bin, zero-count
/// bins included. Empty input gives no bins.
[[nodiscard]] std::vector<HistogramBin> diameter_histogram(std::span<const double> diameters_mm,
                                                           double bin_width_mm);
/// Uses the measured diameters of the set; unmeasured components are
/// measured on the fly.
[[nodiscard]] std::vector<HistogramBin> diameter_histogram(const ComponentSet& set, double bin_width_mm);

/// Component statistics of one labeled dataset.
struct DatasetLnStats {
  std::size_t volumes = 0;
  std::size_t components = 0;
  std::size_t enlarged_components = 0;
  /// Shortest diameter of every component, volume by volume.
  std::vector<double> diameters_mm;
};

[[nodiscard]] DatasetLnStats dataset_ln_stats(std::span<const LabelMap> label_volumes,
                                              const EnlargementRule& rule = {},
                                              Connectivity connectivity = kDefaultConnectivity);

}  // namespace lnq
