#pragma once

#include "lnq/volgrid/volume.hpp"

namespace lnq {

/// Hounsfield window used for clipping before standardization.
class IntensityWindow {
 public:
  IntensityWindow(double lo, double hi);

  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Default CT window.
inline constexpr double kDefaultWindowLo = -150.0;
inline constexpr double kDefaultWindowHi = 350.0;

/// Clamps to the window, then shifts and scales to zero mean and unit
/// (population) standard deviation over the whole volume. A volume that is
/// constant after clamping maps to all zeros.
[[nodiscard]] Image clip_and_standardize(const Image& image, const IntensityWindow& window);

}  // namespace lnq
