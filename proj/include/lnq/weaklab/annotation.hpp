#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lnq/morph3d/connectivity.hpp"

namespace lnq {

/// Per-voxel supervision code. The numeric values are the on-disk tristate
/// encoding.
enum class Supervision : std::uint8_t { unknown = 0, background = 1, foreground = 2 };

/// Tri-state training annotation: which voxels are known lymph node, known
/// background, or unlabeled (excluded from the loss).
class AnnotationState {
 public:
  /// All voxels UNKNOWN.
  explicit AnnotationState(const Geometry& geometry);
  /// Wraps a tristate volume; throws InvalidArgument on codes other than 0..2.
  explicit AnnotationState(LabelMap codes);

  [[nodiscard]] const Geometry& geometry() const noexcept { return codes_.geometry(); }
  [[nodiscard]] std::size_t size() const noexcept { return codes_.size(); }
  [[nodiscard]] Supervision operator[](std::size_t i) const noexcept {
    return static_cast<Supervision>(codes_[i]);
  }
  void set(std::size_t i, Supervision s) noexcept { codes_[i] = static_cast<std::uint8_t>(s); }

  [[nodiscard]] std::size_t count(Supervision s) const noexcept;
  /// Voxels in state `s` as a binary mask.
  [[nodiscard]] LabelMap mask_of(Supervision s) const;
  /// 1 where the voxel contributes to the loss (state != UNKNOWN).
  [[nodiscard]] LabelMap loss_mask() const;
  /// The raw codes as a tristate volume.
  [[nodiscard]] const LabelMap& codes() const noexcept { return codes_; }

  friend bool operator==(const AnnotationState&, const AnnotationState&) = default;

 private:
  LabelMap codes_;
};

/// Share of voxels that carry supervision.
struct VoxelStats {
  std::size_t total_voxels = 0;
  std::size_t labeled_voxels = 0;
  double ratio_percent = 0.0;
};

/// Weak annotation: annotated lymph nodes become FOREGROUND, everything else
/// UNKNOWN.
[[nodiscard]] AnnotationState from_weak_labels(const LabelMap& weak);

/// Noisy-label training target: every UNKNOWN voxel becomes BACKGROUND.
[[nodiscard]] AnnotationState strategy_noisy_label(const AnnotationState& state);

/// Loss masking keeps the states as they are; UNKNOWN voxels are simply
/// excluded from the loss via the exported mask.
[[nodiscard]] AnnotationState strategy_loss_masking(const AnnotationState& state);

/// Wraps every FOREGROUND instance in a hull of BACKGROUND voxels: the
/// FOREGROUND mask is dilated `margin_voxels` times and the UNKNOWN voxels of
/// the resulting shell are set to BACKGROUND. The margin is counted on the
/// voxel lattice, so anisotropic spacing gives an anisotropic physical hull.
[[nodiscard]] AnnotationState strategy_instance_coating(const AnnotationState& state, int margin_voxels = 1,
                                                        Connectivity connectivity = kDefaultConnectivity);

/// Anatomy labels used as background evidence; empty means every label > 0.
using AnatomySubset = std::vector<std::uint8_t>;

/// Sets UNKNOWN voxels covered by an anatomical structure (label > 0, or in
/// `subset` when given) to BACKGROUND. FOREGROUND is never overwritten.
[[nodiscard]] AnnotationState strategy_pseudo_labeling(const AnnotationState& state, const LabelMap& anatomy,
                                                       const AnatomySubset& subset = {});

[[nodiscard]] VoxelStats voxel_stats(const AnnotationState& state);

/// Files handed to a trainer: target (1 = FOREGROUND) and loss mask
/// (1 = supervised voxel).
struct TrainingPair {
  LabelMap target;
  LabelMap loss_mask;
};

[[nodiscard]] TrainingPair export_training_pair(const AnnotationState& state);

/// Rebuilds the tri-state annotation from a training pair.
[[nodiscard]] AnnotationState from_training_pair(const TrainingPair& pair);

enum class Strategy { noisy_label, loss_masking, instance_coating, pseudo_labeling };

[[nodiscard]] std::string_view to_string(Strategy s) noexcept;
/// Accepts the CLI spellings `noisy`, `mask`, `coat`, `pseudo`.
[[nodiscard]] Strategy strategy_from_string(std::string_view name);

}  // namespace lnq
