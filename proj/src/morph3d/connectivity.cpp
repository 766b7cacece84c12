#include "lnq/morph3d/connectivity.hpp"

#include <array>
#include <cstdlib>
#include <string>

namespace lnq {
namespace {

template <std::size_t N>
constexpr std::array<Index3, N> make_offsets(int max_nonzero) {
  std::array<Index3, N> out{};
  std::size_t k = 0;
  for (int z = -1; z <= 1; ++z)
    for (int y = -1; y <= 1; ++y)
      for (int x = -1; x <= 1; ++x) {
        const int nz = (z != 0) + (y != 0) + (x != 0);
        if (nz == 0 || nz > max_nonzero) continue;
        out[k++] = Index3{z, y, x};
      }
  return out;
}

constexpr auto kSix = make_offsets<6>(1);
constexpr auto kEighteen = make_offsets<18>(2);
constexpr auto kTwentySix = make_offsets<26>(3);

}  // namespace

Connectivity connectivity_from_int(int value) {
  switch (value) {
    case 6: return Connectivity::six;
    case 18: return Connectivity::eighteen;
    case 26: return Connectivity::twentysix;
    default:
      throw Error(ErrorCode::InvalidArgument, "connectivity must be 6, 18 or 26, got " + std::to_string(value));
  }
}

std::span<const Index3> neighbor_offsets(Connectivity c) {
  switch (c) {
    case Connectivity::six: return kSix;
    case Connectivity::eighteen: return kEighteen;
    case Connectivity::twentysix: return kTwentySix;
  }
  return kTwentySix;
}

}  // namespace lnq
