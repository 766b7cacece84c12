#include <random>

#include "doctest.h"
#include "lnq/morph3d/dilate.hpp"
#include "lnq/pipeline/phantom.hpp"
#include "lnq/weaklab/annotation.hpp"
#include "oracles.hpp"

using namespace lnq;

namespace {

const Geometry kGrid{{16, 40, 40}, {3.0, 0.93, 0.93}, {0, 0, 0}};

// Five nodes, two annotated, one organ block on each side.
PhantomCase five_node_phantom(std::uint64_t seed) {
  PhantomSpec s;
  s.geometry = kGrid;
  s.seed = seed;
  s.nodes = {{{9, 8, 8}, {3.5, 3, 3}, true},
             {{9, 8, 28}, {3.5, 3, 3}, false},
             {{24, 18, 18}, {5, 4, 4}, true},
             {{36, 28, 8}, {3.5, 3, 3}, false},
             {{36, 28, 28}, {3.5, 3, 3}, false}};
  s.organs = {{{0, 0, 0}, {15, 39, 2}, 13, -850.0f}, {{0, 0, 37}, {15, 39, 39}, 15, -850.0f}};
  return render_phantom(s);
}

AnnotationState random_state(std::mt19937_64& rng) {
  auto m = oracle::random_mask(rng, 10);
  LabelMap codes(m.geometry(), VolumeKind::tristate, std::uint8_t{0});
  for (auto& v : codes.data()) {
    const auto r = rng() % 20;
    v = r == 0 ? 2 : r < 4 ? 1 : 0;
  }
  return AnnotationState(codes);
}

LabelMap random_anatomy(std::mt19937_64& rng, const Geometry& g) {
  LabelMap a(g, VolumeKind::label, std::uint8_t{0});
  for (auto& v : a.data()) v = rng() % 3 == 0 ? static_cast<std::uint8_t>(1 + rng() % 104) : 0;
  return a;
}

void check_monotone(const AnnotationState& before, const AnnotationState& after) {
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] == Supervision::foreground) CHECK(after[i] == Supervision::foreground);
    if (before[i] != Supervision::unknown) CHECK(after[i] != Supervision::unknown);
  }
  CHECK(voxel_stats(after).ratio_percent >= voxel_stats(before).ratio_percent);
}

}  // namespace

TEST_CASE("from weak labels") {
  LabelMap weak(Geometry{{3, 3, 3}, {1, 1, 1}, {}}, VolumeKind::label, std::uint8_t{0});
  auto s = from_weak_labels(weak);
  CHECK(s.count(Supervision::unknown) == 27);
  for (auto& v : weak.data()) v = 1;
  s = from_weak_labels(weak);
  CHECK(s.count(Supervision::foreground) == 27);

  const auto ph = five_node_phantom(1);
  const auto st = from_weak_labels(ph.weak_labels);
  CHECK(st.count(Supervision::foreground) == count_nonzero(ph.node_masks[0]) + count_nonzero(ph.node_masks[2]));
  CHECK(st.count(Supervision::background) == 0);
}

TEST_CASE("annotation state rejects unknown codes") {
  LabelMap codes(Geometry{{1, 1, 2}, {1, 1, 1}, {}}, VolumeKind::tristate, std::uint8_t{0});
  codes[1] = 3;
  CHECK_THROWS_AS(AnnotationState{codes}, Error);
}

TEST_CASE("noisy label") {
  AnnotationState all_unknown(Geometry{{2, 3, 4}, {1, 1, 1}, {}});
  const auto n = strategy_noisy_label(all_unknown);
  CHECK(n.count(Supervision::background) == 24);

  std::mt19937_64 rng(1);
  auto full = random_state(rng);
  full = strategy_noisy_label(full);
  CHECK(strategy_noisy_label(full) == full);

  const auto ph = five_node_phantom(2);
  const auto out = strategy_noisy_label(from_weak_labels(ph.weak_labels));
  CHECK(out.count(Supervision::unknown) == 0);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (ph.node_masks[1][i]) CHECK(out[i] == Supervision::background);
}

TEST_CASE("loss masking") {
  AnnotationState all_unknown(Geometry{{2, 2, 2}, {1, 1, 1}, {}});
  CHECK(count_nonzero(strategy_loss_masking(all_unknown).loss_mask()) == 0);
  const auto labeled = strategy_noisy_label(all_unknown);
  CHECK(count_nonzero(strategy_loss_masking(labeled).loss_mask()) == 8);

  const auto ph = five_node_phantom(3);
  const auto st = strategy_pseudo_labeling(from_weak_labels(ph.weak_labels), ph.anatomy);
  const auto lm = strategy_loss_masking(st);
  CHECK(lm == st);
  CHECK(count_nonzero(lm.loss_mask()) == st.count(Supervision::foreground) + st.count(Supervision::background));
  for (std::size_t i = 0; i < lm.size(); ++i)
    if (ph.node_masks[3][i]) CHECK(lm[i] == Supervision::unknown);
}

TEST_CASE("instance coating") {
  AnnotationState none(Geometry{{5, 5, 5}, {1, 1, 1}, {}});
  CHECK(strategy_instance_coating(none) == none);

  LabelMap weak(Geometry{{5, 5, 5}, {1, 1, 1}, {}}, VolumeKind::label, std::uint8_t{0});
  weak.at(2, 2, 2) = 1;
  const auto s = from_weak_labels(weak);
  CHECK(strategy_instance_coating(s, 1, Connectivity::six).count(Supervision::background) == 6);
  CHECK(strategy_instance_coating(s, 1, Connectivity::twentysix).count(Supervision::background) == 26);
  CHECK_THROWS_AS((void)strategy_instance_coating(s, 0), Error);

  // The hull is exactly dilate(FG) minus FG.
  const auto ph = five_node_phantom(4);
  const auto st = from_weak_labels(ph.weak_labels);
  const auto coated = strategy_instance_coating(st, 1);
  const auto grown = dilate(ph.weak_labels, Connectivity::twentysix, 1);
  for (std::size_t i = 0; i < st.size(); ++i) {
    const bool hull = grown[i] && !ph.weak_labels[i];
    CHECK((coated[i] == Supervision::background) == hull);
  }
}

TEST_CASE("coating an annotated node that touches a hidden node marks hidden voxels as background") {
  PhantomSpec s;
  s.geometry = kGrid;
  s.nodes = {{{24, 18, 14}, {5, 4, 4}, true}, {{24, 18, 21.5}, {5, 3.5, 3.5}, false}};
  const auto ph = render_phantom(s);
  const auto coated = strategy_instance_coating(from_weak_labels(ph.weak_labels));
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < coated.size(); ++i)
    wrong += ph.node_masks[1][i] && !ph.weak_labels[i] && coated[i] == Supervision::background;
  CHECK(wrong > 0);
}

TEST_CASE("pseudo labeling") {
  std::mt19937_64 rng(5);
  auto st = random_state(rng);
  const LabelMap zero(st.geometry(), VolumeKind::label, std::uint8_t{0});
  CHECK(strategy_pseudo_labeling(st, zero) == st);

  // Foreground inside an anatomical structure stays foreground.
  LabelMap weak(Geometry{{1, 1, 3}, {1, 1, 1}, {}}, VolumeKind::label, std::uint8_t{0});
  weak[1] = 1;
  LabelMap anatomy(weak.geometry(), VolumeKind::label, std::uint8_t{7});
  const auto out = strategy_pseudo_labeling(from_weak_labels(weak), anatomy);
  CHECK(out[1] == Supervision::foreground);
  CHECK(out[0] == Supervision::background);

  // Subset restricts which labels count as evidence.
  anatomy[2] = 9;
  const auto only9 = strategy_pseudo_labeling(from_weak_labels(weak), anatomy, {9});
  CHECK(only9[0] == Supervision::unknown);
  CHECK(only9[2] == Supervision::background);

  LabelMap wrong(Geometry{{1, 1, 4}, {1, 1, 1}, {}}, VolumeKind::label, std::uint8_t{0});
  CHECK_THROWS_AS((void)strategy_pseudo_labeling(from_weak_labels(weak), wrong), Error);
}

TEST_CASE("organs covering 55 percent give a ratio of about 55 percent") {
  PhantomSpec s;
  s.geometry = Geometry{{20, 40, 40}, {3.0, 0.93, 0.93}, {}};
  s.organs = {{{0, 0, 0}, {10, 39, 39}, 44, 45.0f}};  // 11 of 20 slices
  s.nodes = {{{45.0, 18.0, 18.0}, {3.0, 3.0, 3.0}, true}};
  const auto ph = render_phantom(s);
  const auto st = strategy_pseudo_labeling(from_weak_labels(ph.weak_labels), ph.anatomy);
  const double fg = 100.0 * static_cast<double>(count_nonzero(ph.weak_labels)) / static_cast<double>(st.size());
  CHECK(voxel_stats(st).ratio_percent == doctest::Approx(55.0 + fg).epsilon(1e-12));
}

TEST_CASE("voxel stats arithmetic") {
  AnnotationState s(Geometry{{10, 10, 10}, {1, 1, 1}, {}});
  CHECK(voxel_stats(s).ratio_percent == 0.0);
  for (std::size_t i = 0; i < 5; ++i) s.set(i, Supervision::background);
  CHECK(voxel_stats(s).ratio_percent == doctest::Approx(0.5));
  CHECK(voxel_stats(s).labeled_voxels == 5);
  CHECK(voxel_stats(strategy_noisy_label(s)).ratio_percent == 100.0);
}

TEST_CASE("training pair round trip") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto st = random_state(rng);
    const auto pair = export_training_pair(st);
    for (std::size_t i = 0; i < st.size(); ++i) {
      CHECK((pair.target[i] == 1) == (st[i] == Supervision::foreground));
      CHECK((pair.loss_mask[i] == 1) == (st[i] != Supervision::unknown));
    }
    CHECK(from_training_pair(pair) == st);
  }
}

TEST_CASE("strategy properties on random states") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 40; ++t) {
    const auto st = random_state(rng);
    const auto anatomy = random_anatomy(rng, st.geometry());
    const auto noisy = strategy_noisy_label(st);
    const auto masked = strategy_loss_masking(st);
    const auto coat = strategy_instance_coating(st);
    const auto pseudo = strategy_pseudo_labeling(st, anatomy);
    for (const auto* out : {&noisy, &masked, &coat, &pseudo}) {
      check_monotone(st, *out);
      CHECK(strategy_noisy_label(*out) == noisy);
    }
    CHECK(strategy_pseudo_labeling(pseudo, anatomy) == pseudo);
    CHECK(strategy_pseudo_labeling(strategy_instance_coating(st), anatomy) ==
          strategy_instance_coating(strategy_pseudo_labeling(st, anatomy)));
  }
}

TEST_CASE("strategy names") {
  CHECK(strategy_from_string("noisy") == Strategy::noisy_label);
  CHECK(strategy_from_string("mask") == Strategy::loss_masking);
  CHECK(strategy_from_string("coat") == Strategy::instance_coating);
  CHECK(strategy_from_string("pseudo") == Strategy::pseudo_labeling);
  CHECK(to_string(Strategy::instance_coating) == "coat");
  CHECK_THROWS_AS((void)strategy_from_string("dense"), Error);
}
