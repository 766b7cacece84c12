#include "lnq/evalkit/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lnq/error.hpp"

namespace lnq {

std::string_view to_string(WilcoxonMethod m) noexcept {
  return m == WilcoxonMethod::exact ? "exact" : "normal_approx";
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
  if (a.empty()) throw Error(ErrorCode::EmptyInput, "paired samples are empty");

  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    if (diff != 0.0) d.push_back(diff);
  }
  WilcoxonResult r;
  r.n_effective = d.size();
  r.method = d.size() <= kWilcoxonExactMaxN ? WilcoxonMethod::exact : WilcoxonMethod::normal_approx;
  if (d.empty()) return r;

  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return std::fabs(d[i]) < std::fabs(d[j]); });

  // Ranks are kept doubled so that average ranks of ties stay integral.
  std::vector<std::int64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
    const auto r2 = static_cast<std::int64_t>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = r2;
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  std::int64_t plus2 = 0;
  std::int64_t minus2 = 0;
  for (std::size_t i = 0; i < n; ++i) (d[i] > 0 ? plus2 : minus2) += rank2[i];
  const std::int64_t w2 = std::min(plus2, minus2);
  r.statistic = static_cast<double>(w2) / 2.0;

  if (r.method == WilcoxonMethod::exact) {
    // Distribution of doubled W+ over every sign assignment, counted exactly.
    const auto total2 = plus2 + minus2;
    std::vector<std::uint64_t> ways(static_cast<std::size_t>(total2) + 1, 0);
    ways[0] = 1;
    std::int64_t reach = 0;
    for (const auto r2 : rank2) {
      for (std::int64_t s = reach; s >= 0; --s) {
        if (ways[s] != 0) ways[s + r2] += ways[s];
      }
      reach += r2;
    }
    std::uint64_t at_most = 0;
    for (std::int64_t s = 0; s <= w2; ++s) at_most += ways[s];
    const double p = 2.0 * static_cast<double>(at_most) / std::ldexp(1.0, static_cast<int>(n));
    r.p_two_sided = std::min(1.0, p);
    return r;
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (!(var > 0.0)) return r;
  const double dev = r.statistic - mean;
  const double z = dev < 0.0 ? (dev + 0.5) / std::sqrt(var) : 0.0;
  r.p_two_sided = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
  return r;
}

}  // namespace lnq
