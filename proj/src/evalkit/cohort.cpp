#include "lnq/evalkit/cohort.hpp"

#include <cmath>
#include <map>
#include <string>

namespace lnq {

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

CohortReport cohort_report(std::span<const CaseMetrics> cases) {
  if (cases.empty()) throw Error(ErrorCode::EmptyInput, "cohort report needs at least one case");
  CohortReport r;
  r.cases = cases.size();
  r.per_case.assign(cases.begin(), cases.end());
  std::vector<double> dice;
  std::vector<double> assd;
  for (const auto& c : cases) {
    dice.push_back(c.dice);
    assd.push_back(c.assd_mm);
    r.assd_fallbacks += c.assd_fallback_used;
  }
  r.dice = mean_std(dice);
  r.assd_mm = mean_std(assd);
  return r;
}

PairedComparison compare_reports(std::span<const CaseMetrics> a, std::span<const CaseMetrics> b) {
  std::map<std::string, const CaseMetrics*> right;
  for (const auto& c : b) right[c.case_id] = &c;
  if (right.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "duplicate case ids in report");
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "reports cover different numbers of cases");

  // Pair in case-id order so the result does not depend on row order.
  std::map<std::string, const CaseMetrics*> left;
  for (const auto& c : a) left[c.case_id] = &c;
  if (left.size() != a.size()) throw Error(ErrorCode::InvalidArgument, "duplicate case ids in report");
  std::vector<double> da, db, aa, ab;
  for (const auto& [id, ca] : left) {
    const auto it = right.find(id);
    if (it == right.end()) throw Error(ErrorCode::InvalidArgument, "case '" + id + "' missing from second report");
    da.push_back(ca->dice);
    db.push_back(it->second->dice);
    aa.push_back(ca->assd_mm);
    ab.push_back(it->second->assd_mm);
  }
  return {wilcoxon_signed_rank(da, db), wilcoxon_signed_rank(aa, ab)};
}

std::pair<OverlapBinCurve, OverlapBinCurve> cohort_overlap_curves(std::span<const OverlapAnalysis> cases,
                                                                  double bin_width_mm) {
  std::vector<ComponentOverlap> gt;
  std::vector<ComponentOverlap> pred;
  for (const auto& c : cases) {
    gt.insert(gt.end(), c.gt_components.begin(), c.gt_components.end());
    pred.insert(pred.end(), c.pred_components.begin(), c.pred_components.end());
  }
  return {bin_overlaps(gt, OverlapDirection::gt_on_pred, bin_width_mm),
          bin_overlaps(pred, OverlapDirection::pred_on_gt, bin_width_mm)};
}

}  // namespace lnq
