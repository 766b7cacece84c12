// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "lnq/evalkit/cohort.hpp"
#include "lnq/measure/stats.hpp"
#include "lnq/morph3d/components.hpp"
#include "lnq/morph3d/dilate.hpp"
#include "lnq/pipeline/commands.hpp"
#include "lnq/pipeline/phantom.hpp"
#include "oracles.hpp"

using namespace lnq;
using Clock = std::chrono::steady_clock;

namespace {

fs::path g_work;

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Outcome morphology_oracles() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  int masks = 0;
  for (int t = 0; t < 220 && o.ok; ++t, ++masks) {
    const auto m = oracle::random_mask(rng, 20);
    for (int c : {6, 18, 26}) {
      const auto set = connected_components(m, connectivity_from_int(c));
      const auto ref = oracle::bfs_components(m, c);
      bool same = set.size() == ref.size();
      for (std::size_t k = 0; same && k < ref.size(); ++k) same = set.components[k].voxels == ref[k];
      if (!same) o.fail("components differ at mask " + std::to_string(t));
      const int iters = 1 + static_cast<int>(rng() % 3);
      if (!(dilate(m, connectivity_from_int(c), iters) == oracle::sweep_dilate(m, c, iters)))
        o.fail("dilation differs at mask " + std::to_string(t));
    }
  }
  const double s = seconds_since(t0);
  if (s >= 30.0) o.fail("took " + fmt(s) + " s");
  if (o.ok) o.detail = std::to_string(masks) + " masks x 3 connectivities, " + fmt(s) + " s";
  return o;
}

Outcome metric_oracles() {
  Outcome o;
  std::mt19937_64 rng(202);
  double worst_dice = 0.0, worst_assd = 0.0;
  int pairs = 0;
  for (int t = 0; t < 120; ++t, ++pairs) {
    auto a = oracle::random_mask(rng, 16);
    LabelMap b(a.geometry(), VolumeKind::label, std::uint8_t{0});
    const double density = static_cast<double>(rng() % 100) / 100.0;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<double>(rng() % 1000) / 1000.0 < density;
    if (t % 10 == 0) b = a;
    if (t % 17 == 0) std::fill(b.data().begin(), b.data().end(), std::uint8_t{0});
    worst_dice = std::max(worst_dice, std::abs(dice(b, a) - oracle::set_dice(b, a)));
    for (auto method : {DistanceMethod::automatic, DistanceMethod::brute_force, DistanceMethod::distance_transform}) {
      bool fb = false;
      const double want = oracle::brute_assd(b, a, &fb);
      const auto got = assd(b, a, method);
      worst_assd = std::max(worst_assd, std::abs(got.assd_mm - want));
      if (got.fallback_used != fb) o.fail("fallback flag differs at pair " + std::to_string(t));
    }
  }
  if (worst_dice > 1e-12) o.fail("dice error " + fmt(worst_dice));
  if (worst_assd > 1e-9) o.fail("assd error " + fmt(worst_assd) + " mm");
  if (o.ok) o.detail = std::to_string(pairs) + " pairs, max |dice err| " + fmt(worst_dice) + ", max |assd err| " + fmt(worst_assd);
  return o;
}

Outcome recist_measurement() {
  Outcome o;
  const Vec3 sp{3.0, 0.93, 0.93};
  const Geometry g{{16, 64, 64}, sp, {0, 0, 0}};
  std::ostringstream got;
  for (double r : {3.0, 5.0, 8.0, 12.0}) {
    const auto m = oracle::digitized_sphere(g, {22.5, 29.76, 29.76}, r);
    std::vector<Index3> v;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) v.push_back(g.index_of(i));
    const double d = shortest_diameter(v, sp).shortest_diameter_mm;
    const double ref = oracle::shortest_diameter(v, sp);
    got << " r" << r << "=" << fmt(d);
    if (std::abs(d - 2.0 * r) > 1.5) o.fail("r=" + fmt(r) + " measured " + fmt(d));
    if (std::abs(d - ref) > 1e-9) o.fail("r=" + fmt(r) + " differs from boundary-pair oracle");
  }
  if (!classify_enlarged(10.0) || classify_enlarged(std::nextafter(10.0, 0.0)))
    o.fail("threshold does not flip at 10.0 mm");
  if (o.ok) o.detail = "diameters" + got.str() + ", flip at 10.0 mm";
  return o;
}

PhantomSpec hidden_node_phantom(std::uint64_t seed) {
  PhantomSpec s;
  s.case_id = "hidden";
  s.geometry = Geometry{{20, 64, 64}, {2.5, 0.8, 0.8}, {0, 0, 0}};
  s.seed = seed;
  s.nodes = {{{25, 20, 20}, {5, 5, 5}, true},
             {{25, 20, 32}, {4, 4, 4}, false},
             {{12, 40, 30}, {3, 3, 3}, false},
             {{37, 34, 16}, {6, 5, 5}, true}};
  s.organs = {{{0, 0, 2}, {19, 63, 12}, 13, -850.0f}, {{0, 0, 50}, {19, 63, 61}, 15, -850.0f},
              {{5, 48, 20}, {15, 60, 44}, 44, 45.0f}};
  return s;
}

Outcome strategy_semantics() {
  Outcome o;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto ph = render_phantom(hidden_node_phantom(seed));
    LabelMap hidden(ph.weak_labels.geometry(), VolumeKind::label, std::uint8_t{0});
    for (std::size_t n = 0; n < ph.node_masks.size(); ++n)
      if (!ph.spec.nodes[n].annotated)
        for (std::size_t i = 0; i < hidden.size(); ++i) hidden[i] |= ph.node_masks[n][i] && !ph.weak_labels[i];
    if (count_nonzero(hidden) == 0) o.fail("phantom has no hidden voxels");

    const auto raw = from_weak_labels(ph.weak_labels);
    if (strategy_noisy_label(raw).count(Supervision::unknown) != 0) o.fail("noisy label left unknown voxels");
    const auto masked = strategy_loss_masking(raw);
    const auto coated = strategy_instance_coating(raw, 1);
    const auto grown = dilate(ph.weak_labels, Connectivity::twentysix, 1);
    const auto pseudo = strategy_pseudo_labeling(raw, ph.anatomy);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (hidden[i] && masked[i] != Supervision::unknown) o.fail("loss masking labeled a hidden voxel");
      const bool hull = grown[i] && !ph.weak_labels[i];
      if ((coated[i] == Supervision::background) != hull) o.fail("coating hull differs from dilate(FG)\\FG");
      if (raw[i] == Supervision::foreground && pseudo[i] != Supervision::foreground)
        o.fail("pseudo labeling altered foreground");
    }
    if (!(strategy_pseudo_labeling(pseudo, ph.anatomy) == pseudo)) o.fail("pseudo labeling not idempotent");
  }

  // Supervision ratio through the preprocessing stages of a small cohort.
  const auto dir = g_work / "criterion4";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "spec.json")
      << R"({"cohort": {"seed": 4, "count": 3, "dims": [24, 80, 80], "spacing": [2.5, 0.8, 0.8],
             "nodes": [2, 5], "radius_mm": [2, 8], "annotated_fraction": 0.4}})";
  PipelineConfig cfg;
  (void)cmd_phantom(dir / "spec.json", dir / "out", cfg);
  std::ostringstream seq;
  for (const auto& c : discover_cases(dir / "out" / "cases")) {
    const auto t = cmd_preprocess(c, cfg);
    const double raw_r = std::get<double>(t.rows[0][4]);
    const double crop_r = std::get<double>(t.rows[1][4]);
    const double pseudo_r = std::get<double>(t.rows[2][4]);
    if (!(raw_r <= crop_r && crop_r <= pseudo_r)) o.fail("ratio decreases in " + c.filename().string());
    if (seq.tellp() == 0) seq << fmt(raw_r) << "% -> " << fmt(crop_r) << "% -> " << fmt(pseudo_r) << "%";
  }
  if (o.ok) o.detail = "3 phantoms, ratio " + seq.str();
  return o;
}

Outcome postprocess_filter_check() {
  Outcome o;
  const Geometry g{{16, 64, 64}, {3.0, 0.93, 0.93}, {0, 0, 0}};
  const auto big = oracle::digitized_sphere(g, {22.5, 20.0, 20.0}, 8.0);
  const auto small = oracle::digitized_sphere(g, {22.5, 45.0, 45.0}, 3.0);
  auto both = big;
  for (std::size_t i = 0; i < both.size(); ++i) both[i] |= small[i];
  if (!(postprocess_filter(both, 9.5) == big)) o.fail("two-sphere phantom not reduced to the large sphere");

  std::mt19937_64 rng(505);
  for (int t = 0; t < 100; ++t) {
    const auto m = oracle::random_mask(rng, 14);
    const double thr = 0.5 + static_cast<double>(rng() % 100) / 10.0;
    const auto once = postprocess_filter(m, thr);
    if (!(postprocess_filter(once, thr) == once)) o.fail("not idempotent at mask " + std::to_string(t));
    for (std::size_t i = 0; i < m.size(); ++i)
      if (once[i] && !m[i]) o.fail("output not a subset at mask " + std::to_string(t));
  }
  if (o.ok) o.detail = "small sphere removed, 100 random masks idempotent and shrinking";
  return o;
}

Outcome wilcoxon_check() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(t % 10);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = std::round(nd(rng) * 4.0) / 4.0;
      b[i] = t % 3 == 0 ? a[i] + std::round(nd(rng) * 2.0) / 2.0 : std::round(nd(rng) * 4.0) / 4.0;
    }
    worst = std::max(worst, std::abs(wilcoxon_signed_rank(a, b).p_two_sided - oracle::wilcoxon_enumeration(a, b)));
  }
  if (worst > 1e-12) o.fail("max |p err| " + fmt(worst));
  const std::vector<double> d{1, 2, 3, 4, 5}, zero(5, 0.0);
  const double p5 = wilcoxon_signed_rank(d, zero).p_two_sided;
  if (std::abs(p5 - 0.0625) > 1e-12) o.fail("d=1..5 gives p=" + fmt(p5));
  const double same = wilcoxon_signed_rank(d, d).p_two_sided;
  if (same != 1.0) o.fail("identical samples give p=" + fmt(same));
  if (o.ok) o.detail = "50 samples n<=10 max |p err| " + fmt(worst) + ", p(1..5)=" + fmt(p5);
  return o;
}

Outcome overlap_curve_contrast() {
  Outcome o;
  CohortSpec c;
  c.seed = 77;
  c.count = 12;
  c.dims = {30, 96, 96};
  c.spacing = {2.5, 0.8, 0.8};
  c.nodes_min = 3;
  c.nodes_max = 6;
  c.radius_min_mm = 2.0;
  c.radius_max_mm = 9.0;
  c.models = {{"all_sizes", 0.0, 1.0, 0.0, 0.8}, {"enlarged_only", 10.0, 1.0, 0.0, 0.8}};
  std::vector<OverlapAnalysis> all, big;
  for (const auto& spec : expand_cohort(c)) {
    const auto ph = render_phantom(spec);
    all.push_back(component_overlaps(ph.predictions[0].second, ph.full_labels));
    big.push_back(component_overlaps(ph.predictions[1].second, ph.full_labels));
  }
  const auto curve_big = cohort_overlap_curves(big, 2.5).first;
  const auto curve_all = cohort_overlap_curves(all, 2.5).first;
  if (curve_big.direction != OverlapDirection::gt_on_pred) o.fail("first curve is not gt_on_pred");
  double below_max = 0.0, above_min = 1.0, all_below_min = 1.0;
  std::size_t below_bins = 0, above_bins = 0;
  for (const auto& b : curve_big.bins) {
    if (b.hi_mm <= 10.0) {
      below_max = std::max(below_max, b.mean_overlap);
      ++below_bins;
    } else if (b.lo_mm >= 10.0) {
      above_min = std::min(above_min, b.mean_overlap);
      ++above_bins;
    }
  }
  for (const auto& b : curve_all.bins)
    if (b.hi_mm <= 10.0) all_below_min = std::min(all_below_min, b.mean_overlap);
  if (below_bins == 0 || above_bins == 0) o.fail("cohort does not populate both sides of 10 mm");
  if (below_max > 0.05) o.fail("mean below 10 mm reaches " + fmt(below_max));
  if (above_min < 0.8) o.fail("mean above 10 mm drops to " + fmt(above_min));
  if (all_below_min < 0.5) o.fail("all-sizes model does not cover small nodes");
  if (o.ok)
    o.detail = "enlarged-only: max " + fmt(below_max) + " in " + std::to_string(below_bins) +
               " bins < 10 mm, min " + fmt(above_min) + " in " + std::to_string(above_bins) +
               " bins >= 10 mm; all-sizes min " + fmt(all_below_min) + " below 10 mm";
  return o;
}

#ifdef LNQKIT_PATH
int run(const std::string& cmd) {
  return std::system((cmd + " > /dev/null").c_str());
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = ss.str();
  }
  return files;
}

// Runs the CLI chain into `dir`; returns false on a nonzero exit.
bool cli_pipeline(const fs::path& dir, const fs::path& spec) {
  const std::string kit = std::string("\"") + LNQKIT_PATH + "\"";
  const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
  const auto out = dir / "phantom";
  return run(kit + " phantom " + q(spec) + " " + q(out)) == 0 &&
         run(kit + " preprocess --workers 4 " + q(out / "cases")) == 0 &&
         run(kit + " strategy --workers 4 pseudo " + q(out / "cases")) == 0 &&
         run(kit + " eval --pred " + q(out / "predictions" / "all_sizes") + " --gt " + q(out / "ground-truth") +
             " --out " + q(dir / "eval_all")) == 0 &&
         run(kit + " eval --pred " + q(out / "predictions" / "enlarged_only") + " --gt " +
             q(out / "ground-truth") + " --out " + q(dir / "eval_big")) == 0 &&
         run(kit + " compare " + q(dir / "eval_all" / "cases.tsv") + " " + q(dir / "eval_big" / "cases.tsv") +
             " --names all_sizes,enlarged_only --out " + q(dir / "compare")) == 0;
}
#endif

Outcome end_to_end_determinism() {
  Outcome o;
#ifndef LNQKIT_PATH
  o.fail("built without the lnqkit executable");
#else
  const auto dir = g_work / "criterion8";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto spec = dir / "cohort.json";
  std::ofstream(spec) << R"({"cohort": {"seed": 8, "count": 10, "dims": [30, 112, 112], "spacing": [2.5, 0.8, 0.8],
    "nodes": [2, 6], "radius_mm": [2, 10], "annotated_fraction": 0.4, "noise_std_hu": 20,
    "models": [{"name": "all_sizes", "radius_scale": 0.95, "miss_probability": 0.1, "max_shift_mm": 0.8},
               {"name": "enlarged_only", "min_node_diameter_mm": 10, "max_shift_mm": 0.8}]}})";
  const auto run_dir = dir / "run";
  std::map<std::string, std::string> first;
  double slowest = 0.0;
  for (int pass = 0; pass < 2 && o.ok; ++pass) {
    fs::remove_all(run_dir);
    const auto t0 = Clock::now();
    if (!cli_pipeline(run_dir, spec)) o.fail("a CLI step exited nonzero on pass " + std::to_string(pass + 1));
    slowest = std::max(slowest, seconds_since(t0));
    if (!o.ok) break;
    auto files = snapshot(run_dir);
    if (pass == 0) {
      first = std::move(files);
    } else if (files != first) {
      for (const auto& [name, bytes] : first) {
        const auto it = files.find(name);
        if (it == files.end() || it->second != bytes) {
          o.fail("output differs: " + name);
          break;
        }
      }
      if (o.ok) o.fail("file sets differ");
    }
  }
  if (o.ok && first.count("compare/wilcoxon_dice.tsv") == 0) o.fail("compare wrote no p-value matrix");
  if (slowest >= 120.0) o.fail("10-case run took " + fmt(slowest) + " s");
  if (o.ok) o.detail = std::to_string(first.size()) + " files byte-identical, 10-case run " + fmt(slowest) + " s";
#endif
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "lnq-acceptance";
  fs::create_directories(g_work);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"morphology matches flood-fill and sweep oracles", morphology_oracles},
      {"dice and assd match direct oracles", metric_oracles},
      {"short-axis diameter of digitized spheres", recist_measurement},
      {"weak-label strategy semantics", strategy_semantics},
      {"postprocessing filter", postprocess_filter_check},
      {"exact Wilcoxon signed-rank test", wilcoxon_check},
      {"size-dependent overlap contrast", overlap_curve_contrast},
      {"end-to-end determinism and runtime", end_to_end_determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.ok;
    std::cout << (o.ok ? "[PASS]" : "[FAIL]") << " criterion " << k + 1 << ": " << criteria[k].first << " ("
              << o.detail << ")" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
