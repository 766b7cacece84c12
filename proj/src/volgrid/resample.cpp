#include "lnq/volgrid/resample.hpp"

#include <algorithm>
#include <cmath>

namespace lnq {
namespace {

struct AxisSamples {
  std::vector<std::int64_t> lo;  // lower neighbour (or nearest index)
  std::vector<std::int64_t> hi;
  std::vector<double> frac;      // weight of `hi`
};

AxisSamples axis_samples(std::int64_t in_n, double in_s, std::int64_t out_n, double out_s, bool nearest) {
  AxisSamples a;
  a.lo.resize(out_n);
  a.hi.resize(out_n);
  a.frac.resize(out_n);
  const double ratio = out_s / in_s;
  const double last = static_cast<double>(in_n - 1);
  for (std::int64_t i = 0; i < out_n; ++i) {
    double u = (static_cast<double>(i) + 0.5) * ratio - 0.5;
    u = std::clamp(u, 0.0, last);
    if (nearest) {
      const auto k = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(u + 0.5)), in_n - 1);
      a.lo[i] = a.hi[i] = k;
      a.frac[i] = 0.0;
    } else {
      const auto k = static_cast<std::int64_t>(std::floor(u));
      a.lo[i] = k;
      a.hi[i] = std::min(k + 1, in_n - 1);
      a.frac[i] = u - static_cast<double>(k);
    }
  }
  return a;
}

Geometry target_geometry(const Geometry& g, const Vec3& t) {
  if (!(t.z > 0.0) || !(t.y > 0.0) || !(t.x > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "target spacing must be > 0 on every axis");
  }
  Geometry out;
  out.dims = resampled_dims(g, t);
  out.spacing = t;
  out.origin = {g.origin.z - 0.5 * g.spacing.z + 0.5 * t.z, g.origin.y - 0.5 * g.spacing.y + 0.5 * t.y,
                g.origin.x - 0.5 * g.spacing.x + 0.5 * t.x};
  return out;
}

template <typename T>
std::vector<T> sample_nearest(const Volume<T>& in, const Geometry& out) {
  const auto& g = in.geometry();
  const auto az = axis_samples(g.dims.z, g.spacing.z, out.dims.z, out.spacing.z, true);
  const auto ay = axis_samples(g.dims.y, g.spacing.y, out.dims.y, out.spacing.y, true);
  const auto ax = axis_samples(g.dims.x, g.spacing.x, out.dims.x, out.spacing.x, true);
  std::vector<T> data(out.voxel_count());
  std::size_t o = 0;
  for (std::int64_t z = 0; z < out.dims.z; ++z)
    for (std::int64_t y = 0; y < out.dims.y; ++y)
      for (std::int64_t x = 0; x < out.dims.x; ++x) data[o++] = in.at(az.lo[z], ay.lo[y], ax.lo[x]);
  return data;
}

}  // namespace

Index3 resampled_dims(const Geometry& g, const Vec3& t) {
  auto axis = [](std::int64_t n, double s, double target) {
    return std::max<std::int64_t>(1, std::llround(static_cast<double>(n) * s / target));
  };
  return {axis(g.dims.z, g.spacing.z, t.z), axis(g.dims.y, g.spacing.y, t.y), axis(g.dims.x, g.spacing.x, t.x)};
}

Image resample(const Image& image, const Vec3& target_spacing, Interpolation mode) {
  const Geometry out = target_geometry(image.geometry(), target_spacing);
  if (mode == Interpolation::nearest || image.kind() != VolumeKind::intensity) {
    if (mode != Interpolation::nearest) {
      throw Error(ErrorCode::InvalidArgument, "trilinear interpolation requested for label data");
    }
    return Image(out, image.kind(), sample_nearest(image, out));
  }

  const auto& g = image.geometry();
  const auto az = axis_samples(g.dims.z, g.spacing.z, out.dims.z, out.spacing.z, false);
  const auto ay = axis_samples(g.dims.y, g.spacing.y, out.dims.y, out.spacing.y, false);
  const auto ax = axis_samples(g.dims.x, g.spacing.x, out.dims.x, out.spacing.x, false);
  std::vector<float> data(out.voxel_count());
  std::size_t o = 0;
  for (std::int64_t z = 0; z < out.dims.z; ++z) {
    const double fz = az.frac[z];
    for (std::int64_t y = 0; y < out.dims.y; ++y) {
      const double fy = ay.frac[y];
      for (std::int64_t x = 0; x < out.dims.x; ++x) {
        const double fx = ax.frac[x];
        auto v = [&](std::int64_t zz, std::int64_t yy, std::int64_t xx) {
          return static_cast<double>(image.at(zz, yy, xx));
        };
        auto lerp_x = [&](std::int64_t zz, std::int64_t yy) {
          const double a = v(zz, yy, ax.lo[x]);
          const double b = v(zz, yy, ax.hi[x]);
          return fx == 0.0 ? a : a + (b - a) * fx;
        };
        auto lerp_y = [&](std::int64_t zz) {
          const double a = lerp_x(zz, ay.lo[y]);
          const double b = lerp_x(zz, ay.hi[y]);
          return fy == 0.0 ? a : a + (b - a) * fy;
        };
        const double a = lerp_y(az.lo[z]);
        const double b = lerp_y(az.hi[z]);
        data[o++] = static_cast<float>(fz == 0.0 ? a : a + (b - a) * fz);
      }
    }
  }
  return Image(out, image.kind(), std::move(data));
}

LabelMap resample(const LabelMap& labels, const Vec3& target_spacing, Interpolation mode) {
  if (mode != Interpolation::nearest) {
    throw Error(ErrorCode::InvalidArgument, "trilinear interpolation requested for label data");
  }
  const Geometry out = target_geometry(labels.geometry(), target_spacing);
  return LabelMap(out, labels.kind(), sample_nearest(labels, out));
}

}  // namespace lnq
