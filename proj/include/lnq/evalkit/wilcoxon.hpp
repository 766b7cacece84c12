#pragma once

#include <span>
#include <string_view>

namespace lnq {

enum class WilcoxonMethod { exact, normal_approx };

[[nodiscard]] std::string_view to_string(WilcoxonMethod m) noexcept;

struct WilcoxonResult {
  /// Pairs left after dropping zero differences.
  std::size_t n_effective = 0;
  /// min(W+, W-) over average ranks of |a - b|.
  double statistic = 0.0;
  double p_two_sided = 1.0;
  WilcoxonMethod method = WilcoxonMethod::exact;
};

/// Largest effective sample size that gets the exact null distribution.
inline constexpr std::size_t kWilcoxonExactMaxN = 25;

/// Paired two-sided Wilcoxon signed-rank test of a against b.
///
/// Zero differences are dropped, tied |differences| share their average rank.
/// Up to kWilcoxonExactMaxN pairs the p-value is exact: the share of all 2^n
/// sign assignments whose W+ is at most the observed statistic, doubled and
/// capped at 1. Larger samples use the normal approximation with tie-corrected
/// variance and a 0.5 continuity correction. No remaining pairs gives p = 1.
[[nodiscard]] WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

}  // namespace lnq
