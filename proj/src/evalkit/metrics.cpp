#include "lnq/evalkit/metrics.hpp"

#include <cmath>
#include <numeric>

namespace lnq {

double dice(const LabelMap& prediction, const LabelMap& ground_truth) {
  require_same_shape(prediction.geometry(), ground_truth.geometry(), "dice");
  std::size_t p = 0;
  std::size_t g = 0;
  std::size_t both = 0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const bool a = prediction[i] != 0;
    const bool b = ground_truth[i] != 0;
    p += a;
    g += b;
    both += a && b;
  }
  if (p + g == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(p + g);
}

double physical_diagonal_mm(const Geometry& g) noexcept {
  const auto e = g.extent_mm();
  return std::sqrt(e.z * e.z + e.y * e.y + e.x * e.x);
}

AssdResult assd(const LabelMap& prediction, const LabelMap& ground_truth, DistanceMethod method) {
  require_same_shape(prediction.geometry(), ground_truth.geometry(), "assd");
  const auto sp = surface_voxels(prediction);
  const auto sg = surface_voxels(ground_truth);
  if (sp.empty() && sg.empty()) return {0.0, true};
  if (sp.empty() || sg.empty()) return {physical_diagonal_mm(prediction.geometry()), true};

  const auto& spacing = prediction.spacing();
  const auto forward = directed_surface_distances(sp, sg, spacing, method);
  const auto backward = directed_surface_distances(sg, sp, spacing, method);
  const double total = std::accumulate(forward.begin(), forward.end(), 0.0) +
                       std::accumulate(backward.begin(), backward.end(), 0.0);
  return {total / static_cast<double>(forward.size() + backward.size()), false};
}

CaseMetrics evaluate_case(std::string case_id, const LabelMap& prediction, const LabelMap& ground_truth) {
  const auto a = assd(prediction, ground_truth);
  return {std::move(case_id), dice(prediction, ground_truth), a.assd_mm, a.fallback_used};
}

}  // namespace lnq
