#pragma once

#include <span>
#include <vector>

#include "lnq/evalkit/metrics.hpp"
#include "lnq/evalkit/overlap.hpp"
#include "lnq/evalkit/wilcoxon.hpp"

namespace lnq {

/// Mean and population standard deviation.
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

[[nodiscard]] MeanStd mean_std(std::span<const double> values);

/// Cohort summary in the mean ± std presentation of a results table.
struct CohortReport {
  std::size_t cases = 0;
  MeanStd dice;
  MeanStd assd_mm;
  std::size_t assd_fallbacks = 0;
  std::vector<CaseMetrics> per_case;
};

/// Throws EmptyInput for an empty cohort.
[[nodiscard]] CohortReport cohort_report(std::span<const CaseMetrics> cases);

/// Wilcoxon tests of two reports paired by case id (cases missing from
/// either side are an error).
struct PairedComparison {
  WilcoxonResult dice;
  WilcoxonResult assd;
};

[[nodiscard]] PairedComparison compare_reports(std::span<const CaseMetrics> a, std::span<const CaseMetrics> b);

/// Pools component overlaps from many cases into cohort curves.
[[nodiscard]] std::pair<OverlapBinCurve, OverlapBinCurve> cohort_overlap_curves(
    std::span<const OverlapAnalysis> cases, double bin_width_mm = 2.5);

}  // namespace lnq
