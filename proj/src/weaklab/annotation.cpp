#include "lnq/weaklab/annotation.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "lnq/morph3d/dilate.hpp"

namespace lnq {

AnnotationState::AnnotationState(const Geometry& geometry)
    : codes_(geometry, VolumeKind::tristate, static_cast<std::uint8_t>(Supervision::unknown)) {}

AnnotationState::AnnotationState(LabelMap codes) : codes_(std::move(codes)) {
  const auto d = codes_.data();
  if (std::any_of(d.begin(), d.end(), [](auto v) { return v > 2; })) {
    throw Error(ErrorCode::InvalidArgument, "tristate volume holds codes other than 0, 1, 2");
  }
  codes_ = LabelMap(codes_.geometry(), VolumeKind::tristate, std::move(codes_).release());
}

std::size_t AnnotationState::count(Supervision s) const noexcept {
  const auto d = codes_.data();
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), static_cast<std::uint8_t>(s)));
}

LabelMap AnnotationState::mask_of(Supervision s) const {
  LabelMap out(geometry(), VolumeKind::label, std::uint8_t{0});
  for (std::size_t i = 0; i < size(); ++i) out[i] = (*this)[i] == s ? 1 : 0;
  return out;
}

LabelMap AnnotationState::loss_mask() const {
  LabelMap out(geometry(), VolumeKind::label, std::uint8_t{0});
  for (std::size_t i = 0; i < size(); ++i) out[i] = (*this)[i] != Supervision::unknown ? 1 : 0;
  return out;
}

AnnotationState from_weak_labels(const LabelMap& weak) {
  require_binary(weak, "weak labels");
  AnnotationState state(weak.geometry());
  for (std::size_t i = 0; i < weak.size(); ++i) {
    if (weak[i] != 0) state.set(i, Supervision::foreground);
  }
  return state;
}

AnnotationState strategy_noisy_label(const AnnotationState& state) {
  AnnotationState out = state;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == Supervision::unknown) out.set(i, Supervision::background);
  }
  return out;
}

AnnotationState strategy_loss_masking(const AnnotationState& state) { return state; }

AnnotationState strategy_instance_coating(const AnnotationState& state, int margin_voxels,
                                          Connectivity connectivity) {
  if (margin_voxels < 1) throw Error(ErrorCode::InvalidArgument, "coating margin must be >= 1 voxel");
  AnnotationState out = state;
  const auto fg = state.mask_of(Supervision::foreground);
  if (count_nonzero(fg) == 0) return out;
  const auto grown = dilate(fg, connectivity, margin_voxels);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (grown[i] != 0 && out[i] == Supervision::unknown) out.set(i, Supervision::background);
  }
  return out;
}

AnnotationState strategy_pseudo_labeling(const AnnotationState& state, const LabelMap& anatomy,
                                         const AnatomySubset& subset) {
  require_same_shape(state.geometry(), anatomy.geometry(), "pseudo labeling");
  std::array<bool, 256> counts{};
  if (subset.empty()) {
    counts.fill(true);
  } else {
    for (auto label : subset) counts[label] = true;
  }
  counts[0] = false;

  AnnotationState out = state;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (counts[anatomy[i]] && out[i] == Supervision::unknown) out.set(i, Supervision::background);
  }
  return out;
}

VoxelStats voxel_stats(const AnnotationState& state) {
  VoxelStats s;
  s.total_voxels = state.size();
  s.labeled_voxels = s.total_voxels - state.count(Supervision::unknown);
  s.ratio_percent = s.total_voxels == 0
                        ? 0.0
                        : 100.0 * static_cast<double>(s.labeled_voxels) / static_cast<double>(s.total_voxels);
  return s;
}

TrainingPair export_training_pair(const AnnotationState& state) {
  return {state.mask_of(Supervision::foreground), state.loss_mask()};
}

AnnotationState from_training_pair(const TrainingPair& pair) {
  require_same_shape(pair.target.geometry(), pair.loss_mask.geometry(), "training pair");
  require_binary(pair.target, "target");
  require_binary(pair.loss_mask, "loss mask");
  AnnotationState state(pair.target.geometry());
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (pair.target[i] != 0 && pair.loss_mask[i] == 0) {
      throw Error(ErrorCode::InvalidArgument, "target foreground outside the loss mask");
    }
    if (pair.loss_mask[i] != 0) {
      state.set(i, pair.target[i] != 0 ? Supervision::foreground : Supervision::background);
    }
  }
  return state;
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::noisy_label: return "noisy";
    case Strategy::loss_masking: return "mask";
    case Strategy::instance_coating: return "coat";
    case Strategy::pseudo_labeling: return "pseudo";
  }
  return "noisy";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "noisy") return Strategy::noisy_label;
  if (name == "mask") return Strategy::loss_masking;
  if (name == "coat") return Strategy::instance_coating;
  if (name == "pseudo") return Strategy::pseudo_labeling;
  throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

}  // namespace lnq
