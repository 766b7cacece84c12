#include "lnq/morph3d/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lnq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact 1D squared distance transform (lower envelope of parabolas) over
// `n` samples at stride `stride`, sample spacing `w` mm.
void edt_1d(double* f, std::size_t n, std::size_t stride, double w, std::vector<double>& d,
            std::vector<std::size_t>& v, std::vector<double>& zb) {
  d.resize(n);
  v.resize(n);
  zb.resize(n + 1);
  std::size_t k = 0;
  bool any = false;
  auto meet = [&](std::size_t a, std::size_t b) {
    const double pa = static_cast<double>(a) * w;
    const double pb = static_cast<double>(b) * w;
    return ((f[b * stride] + pb * pb) - (f[a * stride] + pa * pa)) / (2.0 * (pb - pa));
  };
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q * stride] == kInf) continue;
    if (!any) {
      any = true;
      v[0] = q;
      zb[0] = -kInf;
      zb[1] = kInf;
      continue;
    }
    // zb[0] is -inf, so this stops at k == 0 at the latest.
    double s = meet(v[k], q);
    while (s <= zb[k]) {
      --k;
      s = meet(v[k], q);
    }
    ++k;
    v[k] = q;
    zb[k] = s;
    zb[k + 1] = kInf;
  }
  if (!any) return;
  k = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const double pp = static_cast<double>(p) * w;
    while (zb[k + 1] < pp) ++k;
    const double dp = pp - static_cast<double>(v[k]) * w;
    d[p] = dp * dp + f[v[k] * stride];
  }
  for (std::size_t p = 0; p < n; ++p) f[p * stride] = d[p];
}

std::vector<double> distances_brute(std::span<const Index3> from, std::span<const Index3> to, const Vec3& s) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const auto& a : from) {
    double best = kInf;
    for (const auto& b : to) {
      const double dz = static_cast<double>(a.z - b.z) * s.z;
      const double dy = static_cast<double>(a.y - b.y) * s.y;
      const double dx = static_cast<double>(a.x - b.x) * s.x;
      best = std::min(best, dz * dz + dy * dy + dx * dx);
    }
    out.push_back(std::sqrt(best));
  }
  return out;
}

struct Box {
  Index3 lo;
  Index3 dims;
  [[nodiscard]] std::size_t volume() const {
    return static_cast<std::size_t>(dims.z) * static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(dims.x);
  }
};

Box joint_box(std::span<const Index3> a, std::span<const Index3> b) {
  Index3 lo = a.front();
  Index3 hi = a.front();
  auto grow = [&](const Index3& v) {
    lo = {std::min(lo.z, v.z), std::min(lo.y, v.y), std::min(lo.x, v.x)};
    hi = {std::max(hi.z, v.z), std::max(hi.y, v.y), std::max(hi.x, v.x)};
  };
  for (const auto& v : a) grow(v);
  for (const auto& v : b) grow(v);
  return {lo, {hi.z - lo.z + 1, hi.y - lo.y + 1, hi.x - lo.x + 1}};
}

std::vector<double> distances_edt(std::span<const Index3> from, std::span<const Index3> to, const Vec3& s) {
  const Box box = joint_box(from, to);
  const auto nz = static_cast<std::size_t>(box.dims.z);
  const auto ny = static_cast<std::size_t>(box.dims.y);
  const auto nx = static_cast<std::size_t>(box.dims.x);
  std::vector<double> f(box.volume(), kInf);
  auto at = [&](const Index3& v) {
    return (static_cast<std::size_t>(v.z - box.lo.z) * ny + static_cast<std::size_t>(v.y - box.lo.y)) * nx +
           static_cast<std::size_t>(v.x - box.lo.x);
  };
  for (const auto& v : to) f[at(v)] = 0.0;

  std::vector<double> d;
  std::vector<std::size_t> hull;
  std::vector<double> bounds;
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y) edt_1d(&f[(z * ny + y) * nx], nx, 1, s.x, d, hull, bounds);
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t x = 0; x < nx; ++x) edt_1d(&f[z * ny * nx + x], ny, nx, s.y, d, hull, bounds);
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t x = 0; x < nx; ++x) edt_1d(&f[y * nx + x], nz, ny * nx, s.z, d, hull, bounds);

  std::vector<double> out;
  out.reserve(from.size());
  for (const auto& v : from) out.push_back(std::sqrt(f[at(v)]));
  return out;
}

}  // namespace

std::vector<Index3> surface_voxels(const LabelMap& mask) {
  require_binary(mask, "surface_voxels");
  const auto& g = mask.geometry();
  static constexpr Index3 kFaces[] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
  std::vector<Index3> out;
  for (std::int64_t z = 0; z < g.dims.z; ++z)
    for (std::int64_t y = 0; y < g.dims.y; ++y)
      for (std::int64_t x = 0; x < g.dims.x; ++x) {
        if (mask.at(z, y, x) == 0) continue;
        for (const auto& o : kFaces) {
          const Index3 n{z + o.z, y + o.y, x + o.x};
          if (!g.contains(n) || mask.at(n) == 0) {
            out.push_back({z, y, x});
            break;
          }
        }
      }
  return out;
}

std::vector<double> directed_surface_distances(std::span<const Index3> from, std::span<const Index3> to,
                                               const Vec3& spacing, DistanceMethod method) {
  if (to.empty()) throw Error(ErrorCode::EmptySurface, "no target surface voxels");
  if (from.empty()) return {};
  if (method == DistanceMethod::automatic) {
    // Three 1D passes touch every box voxel a few times each.
    const double brute_cost = static_cast<double>(from.size()) * static_cast<double>(to.size());
    const double edt_cost = 8.0 * static_cast<double>(joint_box(from, to).volume());
    method = brute_cost <= edt_cost ? DistanceMethod::brute_force : DistanceMethod::distance_transform;
  }
  return method == DistanceMethod::brute_force ? distances_brute(from, to, spacing)
                                               : distances_edt(from, to, spacing);
}

}  // namespace lnq
