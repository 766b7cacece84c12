#include "lnq/morph3d/dilate.hpp"

namespace lnq {

LabelMap dilate(const LabelMap& mask, Connectivity connectivity, int iterations) {
  require_binary(mask, "dilate");
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "dilate needs iterations >= 1");
  const auto& g = mask.geometry();
  const auto offsets = neighbor_offsets(connectivity);

  LabelMap out(g, mask.kind(), std::vector<std::uint8_t>(mask.data().begin(), mask.data().end()));
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] != 0) frontier.push_back(i);

  // Breadth-first growth: layer k holds voxels exactly k element steps away.
  std::vector<std::size_t> next;
  for (int step = 0; step < iterations && !frontier.empty(); ++step) {
    next.clear();
    for (const auto i : frontier) {
      const auto p = g.index_of(i);
      for (const auto& o : offsets) {
        const Index3 n{p.z + o.z, p.y + o.y, p.x + o.x};
        if (!g.contains(n)) continue;
        const auto j = g.offset(n);
        if (out[j] != 0) continue;
        out[j] = 1;
        next.push_back(j);
      }
    }
    frontier.swap(next);
  }
  return out;
}

}  // namespace lnq
