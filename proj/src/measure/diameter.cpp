#include "lnq/measure/diameter.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lnq {
namespace {

using Point = std::pair<std::int64_t, std::int64_t>;  // (y, x) lattice index

std::int64_t cross(const Point& o, const Point& a, const Point& b) {
  return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

// Andrew's monotone chain on lattice points; collinear points dropped.
std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Relative tolerance for treating two squared pair distances as equal.
constexpr double kTieTolerance = 1e-12;

}  // namespace

SliceAxes measure_axial_slice(std::span<const Point> yx, double spacing_y, double spacing_x) {
  if (yx.empty()) throw Error(ErrorCode::EmptyInput, "cannot measure an empty slice");
  const double footprint = 0.5 * (spacing_y + spacing_x);

  // Every extremal pair and every extreme projection is attained on hull
  // vertices, so the hull gives the same answer as scanning all points.
  const auto hull = convex_hull({yx.begin(), yx.end()});
  std::vector<std::pair<double, double>> p;
  p.reserve(hull.size());
  for (const auto& [y, x] : hull) p.emplace_back(static_cast<double>(y) * spacing_y, static_cast<double>(x) * spacing_x);

  double best_sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double dy = p[i].first - p[j].first;
      const double dx = p[i].second - p[j].second;
      best_sq = std::max(best_sq, dy * dy + dx * dx);
    }

  double short_axis = 0.0;
  if (best_sq > 0.0) {
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        const double dy = p[i].first - p[j].first;
        const double dx = p[i].second - p[j].second;
        const double sq = dy * dy + dx * dx;
        if (sq < best_sq * (1.0 - kTieTolerance)) continue;
        const double len = std::sqrt(sq);
        const double uy = -dx / len;  // unit normal to the long axis
        const double ux = dy / len;
        double lo = INFINITY;
        double hi = -INFINITY;
        for (const auto& [py, px] : p) {
          const double t = py * uy + px * ux;
          lo = std::min(lo, t);
          hi = std::max(hi, t);
        }
        short_axis = std::max(short_axis, hi - lo);
      }
  }
  return {short_axis + footprint, std::sqrt(best_sq) + footprint};
}

DiameterMeasurement shortest_diameter(std::span<const Index3> voxels, const Vec3& spacing, int component_id) {
  if (voxels.empty()) throw Error(ErrorCode::EmptyInput, "cannot measure an empty component");
  std::map<std::int64_t, std::vector<Point>> slices;
  for (const auto& v : voxels) slices[v.z].emplace_back(v.y, v.x);

  DiameterMeasurement best{component_id, -1.0, 0, 0.0};
  for (const auto& [z, pts] : slices) {
    const auto axes = measure_axial_slice(pts, spacing.y, spacing.x);
    // Ascending slice order with a strict comparison: lowest index wins ties.
    if (axes.short_axis_mm > best.shortest_diameter_mm) {
      best.shortest_diameter_mm = axes.short_axis_mm;
      best.long_axis_mm = axes.long_axis_mm;
      best.slice_index = z;
    }
  }
  return best;
}

DiameterMeasurement shortest_diameter(const Component& component, const Vec3& spacing) {
  return shortest_diameter(component.voxels, spacing, component.id);
}

std::vector<DiameterMeasurement> measure_components(ComponentSet& set) {
  std::vector<DiameterMeasurement> out;
  out.reserve(set.size());
  for (auto& c : set.components) {
    out.push_back(shortest_diameter(c, set.geometry.spacing));
    c.shortest_diameter_mm = out.back().shortest_diameter_mm;
  }
  return out;
}

bool classify_enlarged(double shortest_diameter_mm, const EnlargementRule& rule) {
  if (!(rule.threshold_mm > 0.0)) throw Error(ErrorCode::InvalidArgument, "enlargement threshold must be > 0");
  return shortest_diameter_mm >= rule.threshold_mm;
}

bool classify_enlarged(const DiameterMeasurement& m, const EnlargementRule& rule) {
  return classify_enlarged(m.shortest_diameter_mm, rule);
}

LabelMap postprocess_filter(const LabelMap& prediction, double min_short_diameter_mm, Connectivity connectivity) {
  require_binary(prediction, "postprocess_filter");
  LabelMap out = prediction;
  const auto set = connected_components(prediction, connectivity);
  for (const auto& c : set.components) {
    if (shortest_diameter(c, set.geometry.spacing).shortest_diameter_mm >= min_short_diameter_mm) continue;
    for (const auto& v : c.voxels) out.at(v) = 0;
  }
  return out;
}

}  // namespace lnq
