#include "lnq/volgrid/intensity.hpp"

#include <algorithm>
#include <cmath>

namespace lnq {

IntensityWindow::IntensityWindow(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "intensity window requires lo < hi");
}

Image clip_and_standardize(const Image& image, const IntensityWindow& window) {
  if (image.kind() != VolumeKind::intensity) {
    throw Error(ErrorCode::InvalidArgument, "clip_and_standardize needs an intensity volume");
  }
  const auto in = image.data();
  std::vector<double> clamped(in.size());
  std::transform(in.begin(), in.end(), clamped.begin(),
                 [&](float v) { return std::clamp<double>(v, window.lo(), window.hi()); });

  // Two-pass mean/variance in double for a stable, order-fixed result.
  double sum = 0.0;
  for (double v : clamped) sum += v;
  const double n = static_cast<double>(clamped.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : clamped) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);

  const auto [mn, mx] = std::minmax_element(clamped.begin(), clamped.end());
  std::vector<float> out(clamped.size(), 0.0f);
  if (*mn < *mx && sd > 0.0) {
    std::transform(clamped.begin(), clamped.end(), out.begin(),
                   [&](double v) { return static_cast<float>((v - mean) / sd); });
  }
  return Image(image.geometry(), VolumeKind::intensity, std::move(out));
}

}  // namespace lnq
