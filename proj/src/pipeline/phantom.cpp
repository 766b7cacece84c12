#include "lnq/pipeline/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "lnq/measure/diameter.hpp"
#include "lnq/volgrid/io.hpp"

namespace lnq {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 is fully specified by the standard; the distributions are not,
// so uniform and normal draws are derived here from its raw output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

Vec3 physical(const Geometry& g, std::int64_t z, std::int64_t y, std::int64_t x) {
  return {g.origin.z + static_cast<double>(z) * g.spacing.z, g.origin.y + static_cast<double>(y) * g.spacing.y,
          g.origin.x + static_cast<double>(x) * g.spacing.x};
}

void paint_ellipsoid(LabelMap& mask, const Vec3& c, const Vec3& r) {
  const auto& g = mask.geometry();
  auto range = [](double center, double origin, double s, double radius, std::int64_t n) {
    const double ci = (center - origin) / s;
    const double ri = radius / s;
    const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(ci - ri)) - 1);
    const auto hi = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::ceil(ci + ri)) + 1);
    return std::pair{lo, hi};
  };
  const auto [z0, z1] = range(c.z, g.origin.z, g.spacing.z, r.z, g.dims.z);
  const auto [y0, y1] = range(c.y, g.origin.y, g.spacing.y, r.y, g.dims.y);
  const auto [x0, x1] = range(c.x, g.origin.x, g.spacing.x, r.x, g.dims.x);
  for (auto z = z0; z <= z1; ++z)
    for (auto y = y0; y <= y1; ++y)
      for (auto x = x0; x <= x1; ++x) {
        const auto p = physical(g, z, y, x);
        const double dz = (p.z - c.z) / r.z;
        const double dy = (p.y - c.y) / r.y;
        const double dx = (p.x - c.x) / r.x;
        if (dz * dz + dy * dy + dx * dx <= 1.0) mask.at(z, y, x) = 1;
      }
}

std::vector<Index3> voxels_of(const LabelMap& mask) {
  std::vector<Index3> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] != 0) out.push_back(mask.geometry().index_of(i));
  return out;
}

Vec3 vec3_from(const json& j) {
  const auto a = j.get<std::array<double, 3>>();
  return {a[0], a[1], a[2]};
}
Index3 index3_from(const json& j) {
  const auto a = j.get<std::array<std::int64_t, 3>>();
  return {a[0], a[1], a[2]};
}
json to_json(const Vec3& v) { return json::array({v.z, v.y, v.x}); }
json to_json(const Index3& v) { return json::array({v.z, v.y, v.x}); }

SimulatedModel model_from(const json& j) {
  SimulatedModel m;
  m.name = j.at("name").get<std::string>();
  m.min_node_diameter_mm = j.value("min_node_diameter_mm", 0.0);
  m.radius_scale = j.value("radius_scale", 1.0);
  m.miss_probability = j.value("miss_probability", 0.0);
  m.max_shift_mm = j.value("max_shift_mm", 0.0);
  if (m.name.empty() || m.name.find('/') != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "model names must be non-empty and contain no '/'");
  }
  if (!(m.radius_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius_scale must be > 0");
  return m;
}

json model_to_json(const SimulatedModel& m) {
  return {{"name", m.name},
          {"min_node_diameter_mm", m.min_node_diameter_mm},
          {"radius_scale", m.radius_scale},
          {"miss_probability", m.miss_probability},
          {"max_shift_mm", m.max_shift_mm}};
}

PhantomSpec spec_from(const json& j) {
  PhantomSpec s;
  s.case_id = j.value("case_id", s.case_id);
  s.geometry.dims = index3_from(j.at("dims"));
  s.geometry.spacing = vec3_from(j.at("spacing"));
  if (j.contains("origin")) s.geometry.origin = vec3_from(j["origin"]);
  s.seed = j.value("seed", std::uint64_t{0});
  s.noise_std_hu = j.value("noise_std_hu", s.noise_std_hu);
  s.background_hu = j.value("background_hu", s.background_hu);
  s.node_hu = j.value("node_hu", s.node_hu);
  for (const auto& n : j.value("nodes", json::array())) {
    s.nodes.push_back({vec3_from(n.at("center_mm")), vec3_from(n.at("radii_mm")), n.value("annotated", false)});
  }
  for (const auto& o : j.value("organs", json::array())) {
    s.organs.push_back({index3_from(o.at("lo")), index3_from(o.at("hi")), o.at("label").get<std::uint8_t>(),
                        o.value("hu", 40.0f)});
  }
  for (const auto& m : j.value("models", json::array())) s.models.push_back(model_from(m));
  s.validate();
  return s;
}

CohortSpec cohort_from(const json& j) {
  CohortSpec c;
  c.seed = j.value("seed", std::uint64_t{0});
  c.count = j.value("count", c.count);
  if (j.contains("dims")) c.dims = index3_from(j["dims"]);
  if (j.contains("spacing")) c.spacing = vec3_from(j["spacing"]);
  if (j.contains("nodes")) {
    const auto n = j["nodes"].get<std::array<int, 2>>();
    c.nodes_min = n[0];
    c.nodes_max = n[1];
  }
  if (j.contains("radius_mm")) {
    const auto r = j["radius_mm"].get<std::array<double, 2>>();
    c.radius_min_mm = r[0];
    c.radius_max_mm = r[1];
  }
  c.annotated_fraction = j.value("annotated_fraction", c.annotated_fraction);
  c.noise_std_hu = j.value("noise_std_hu", c.noise_std_hu);
  for (const auto& m : j.value("models", json::array())) c.models.push_back(model_from(m));
  if (c.nodes_min < 0 || c.nodes_max < c.nodes_min) throw Error(ErrorCode::InvalidArgument, "bad node count range");
  if (!(c.radius_min_mm > 0.0) || c.radius_max_mm < c.radius_min_mm) {
    throw Error(ErrorCode::InvalidArgument, "bad node radius range");
  }
  return c;
}

}  // namespace

void PhantomSpec::validate() const {
  geometry.validate();
  if (case_id.empty() || case_id.find('/') != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "case_id must be non-empty and contain no '/'");
  }
  const auto ext = geometry.extent_mm();
  for (const auto& n : nodes) {
    const double rz = (n.center_mm.z - geometry.origin.z) / geometry.spacing.z;
    const double ry = (n.center_mm.y - geometry.origin.y) / geometry.spacing.y;
    const double rx = (n.center_mm.x - geometry.origin.x) / geometry.spacing.x;
    if (rz < -0.5 || ry < -0.5 || rx < -0.5 || rz * geometry.spacing.z > ext.z ||
        ry * geometry.spacing.y > ext.y || rx * geometry.spacing.x > ext.x) {
      throw Error(ErrorCode::InvalidArgument, "phantom node centre lies outside the volume");
    }
    if (!(n.radii_mm.z > 0.0 && n.radii_mm.y > 0.0 && n.radii_mm.x > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "phantom node radii must be > 0");
    }
  }
  for (const auto& o : organs) {
    if (!geometry.contains(o.lo) || !geometry.contains(o.hi) || o.lo.z > o.hi.z || o.lo.y > o.hi.y ||
        o.lo.x > o.hi.x) {
      throw Error(ErrorCode::InvalidArgument, "phantom organ box lies outside the volume");
    }
    if (o.label == 0) throw Error(ErrorCode::InvalidArgument, "organ labels must be > 0");
  }
}

PhantomCase render_phantom(const PhantomSpec& spec) {
  spec.validate();
  const auto& g = spec.geometry;
  PhantomCase out;
  out.spec = spec;
  out.full_labels = LabelMap(g, VolumeKind::label, std::uint8_t{0});
  out.weak_labels = out.full_labels;
  out.anatomy = out.full_labels;
  std::vector<float> hu(g.voxel_count(), spec.background_hu);

  for (const auto& o : spec.organs)
    for (auto z = o.lo.z; z <= o.hi.z; ++z)
      for (auto y = o.lo.y; y <= o.hi.y; ++y)
        for (auto x = o.lo.x; x <= o.hi.x; ++x) {
          out.anatomy.at(z, y, x) = o.label;
          hu[g.offset(z, y, x)] = o.hu;
        }

  for (const auto& n : spec.nodes) {
    LabelMap node(g, VolumeKind::label, std::uint8_t{0});
    paint_ellipsoid(node, n.center_mm, n.radii_mm);
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (node[i] == 0) continue;
      out.full_labels[i] = 1;
      if (n.annotated) out.weak_labels[i] = 1;
      out.anatomy[i] = 0;  // anatomical structures never contain lymph nodes
      hu[i] = spec.node_hu;
    }
    out.node_masks.push_back(std::move(node));
  }

  Rng noise(splitmix64(spec.seed));
  if (spec.noise_std_hu > 0.0) {
    for (auto& v : hu) v = static_cast<float>(v + spec.noise_std_hu * noise.normal());
  }
  out.image = Image(g, VolumeKind::intensity, std::move(hu));

  for (std::size_t k = 0; k < spec.models.size(); ++k) {
    const auto& m = spec.models[k];
    Rng rng(splitmix64(spec.seed ^ splitmix64(k + 1)));
    LabelMap pred(g, VolumeKind::label, std::uint8_t{0});
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
      // Fixed number of draws per node keeps later nodes independent of
      // earlier decisions.
      const double u_miss = rng.uniform();
      const double shift_y = rng.uniform(-m.max_shift_mm, m.max_shift_mm);
      const double shift_x = rng.uniform(-m.max_shift_mm, m.max_shift_mm);
      const auto voxels = voxels_of(out.node_masks[i]);
      if (voxels.empty() || u_miss < m.miss_probability) continue;
      if (shortest_diameter(voxels, g.spacing).shortest_diameter_mm < m.min_node_diameter_mm) continue;
      const auto& n = spec.nodes[i];
      paint_ellipsoid(pred, {n.center_mm.z, n.center_mm.y + shift_y, n.center_mm.x + shift_x},
                      {n.radii_mm.z * m.radius_scale, n.radii_mm.y * m.radius_scale, n.radii_mm.x * m.radius_scale});
    }
    out.predictions.emplace_back(m.name, std::move(pred));
  }
  return out;
}

std::vector<PhantomSpec> expand_cohort(const CohortSpec& cohort) {
  std::vector<PhantomSpec> out;
  const Geometry g{cohort.dims, cohort.spacing, {0.0, 0.0, 0.0}};
  g.validate();
  const auto ext = g.extent_mm();
  const auto& d = cohort.dims;
  auto frac = [](std::int64_t n, double f) {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(f * static_cast<double>(n))), 0, n - 1);
  };

  for (std::size_t i = 0; i < cohort.count; ++i) {
    PhantomSpec s;
    s.case_id = "case_" + std::string(3 - std::min<std::size_t>(3, std::to_string(i).size()), '0') + std::to_string(i);
    s.geometry = g;
    s.seed = splitmix64(cohort.seed + 0x632be59bd9b4e019ULL * (i + 1));
    s.noise_std_hu = cohort.noise_std_hu;
    s.models = cohort.models;
    Rng rng(s.seed);

    // Lung lobes on both sides, mediastinal structures in between.
    const auto zmid = frac(d.z, 0.5);
    const auto zlo = frac(d.z, 0.05);
    const auto zhi = frac(d.z, 0.95);
    const auto ylo = frac(d.y, 0.1);
    const auto yhi = frac(d.y, 0.9);
    s.organs.push_back({{zmid, ylo, frac(d.x, 0.02)}, {zhi, yhi, frac(d.x, 0.28)}, 13, -850.0f});
    s.organs.push_back({{zlo, ylo, frac(d.x, 0.02)}, {zmid - 1, yhi, frac(d.x, 0.28)}, 14, -850.0f});
    s.organs.push_back({{zmid, ylo, frac(d.x, 0.72)}, {zhi, yhi, frac(d.x, 0.98)}, 15, -850.0f});
    s.organs.push_back({{zlo, ylo, frac(d.x, 0.72)}, {zmid - 1, yhi, frac(d.x, 0.98)}, 17, -850.0f});
    const double jitter = rng.uniform(-0.03, 0.03);
    s.organs.push_back({{frac(d.z, 0.05), frac(d.y, 0.55 + jitter), frac(d.x, 0.38)},
                        {frac(d.z, 0.45), frac(d.y, 0.85 + jitter), frac(d.x, 0.62)}, 44, 45.0f});  // heart
    s.organs.push_back({{frac(d.z, 0.3), frac(d.y, 0.15), frac(d.x, 0.44)},
                        {frac(d.z, 0.95), frac(d.y, 0.25), frac(d.x, 0.52)}, 43, -900.0f + 1000.0f * 0.2f});  // trachea
    s.organs.push_back({{frac(d.z, 0.2), frac(d.y, 0.3), frac(d.x, 0.55)},
                        {frac(d.z, 0.9), frac(d.y, 0.42), frac(d.x, 0.64)}, 7, 250.0f});  // aorta
    s.organs.push_back({{frac(d.z, 0.1), frac(d.y, 0.86), frac(d.x, 0.47)},
                        {frac(d.z, 0.95), frac(d.y, 0.9), frac(d.x, 0.53)}, 42, 40.0f});  // esophagus

    const int n_nodes = cohort.nodes_min + static_cast<int>(std::floor(rng.uniform() * (cohort.nodes_max - cohort.nodes_min + 1)));
    for (int k = 0; k < std::min(n_nodes, cohort.nodes_max); ++k) {
      for (int attempt = 0; attempt < 200; ++attempt) {
        const double r = rng.uniform(cohort.radius_min_mm, cohort.radius_max_mm);
        const Vec3 radii{std::max(r * rng.uniform(0.8, 1.3), 0.6 * g.spacing.z), r * rng.uniform(0.85, 1.15), r};
        const Vec3 c{rng.uniform(radii.z + g.spacing.z, ext.z - radii.z - 2.0 * g.spacing.z),
                     rng.uniform(0.25 * ext.y, 0.75 * ext.y), rng.uniform(0.32 * ext.x, 0.68 * ext.x)};
        if (c.z < 0.0 || c.z > ext.z - g.spacing.z) continue;
        const double reach = std::max({radii.z, radii.y, radii.x});
        const bool clear = std::all_of(s.nodes.begin(), s.nodes.end(), [&](const PhantomNode& o) {
          const double other = std::max({o.radii_mm.z, o.radii_mm.y, o.radii_mm.x});
          const double dz = c.z - o.center_mm.z, dy = c.y - o.center_mm.y, dx = c.x - o.center_mm.x;
          return std::sqrt(dz * dz + dy * dy + dx * dx) > reach + other + 2.0 * g.spacing.z;
        });
        if (!clear) continue;
        s.nodes.push_back({c, radii, false});
        break;
      }
    }

    // The largest nodes are the annotated ones, at least one per case.
    if (!s.nodes.empty()) {
      std::vector<std::size_t> order(s.nodes.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return s.nodes[a].radii_mm.x > s.nodes[b].radii_mm.x;
      });
      const auto n_annot = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(cohort.annotated_fraction * static_cast<double>(s.nodes.size()))));
      for (std::size_t k = 0; k < std::min(n_annot, order.size()); ++k) s.nodes[order[k]].annotated = true;
    }
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

PhantomFile parse_phantom_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("phantom spec is not valid JSON: ") + e.what());
  }
  try {
    PhantomFile f;
    if (j.contains("cohort")) {
      f.is_cohort = true;
      f.cases = expand_cohort(cohort_from(j["cohort"]));
    } else {
      f.cases.push_back(spec_from(j));
    }
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad phantom spec: ") + e.what());
  }
}

PhantomFile load_phantom_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open phantom spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_phantom_json(ss.str());
}

std::string phantom_spec_to_json_text(const PhantomSpec& s) {
  json j;
  j["case_id"] = s.case_id;
  j["dims"] = to_json(s.geometry.dims);
  j["spacing"] = to_json(s.geometry.spacing);
  j["origin"] = to_json(s.geometry.origin);
  j["seed"] = s.seed;
  j["noise_std_hu"] = s.noise_std_hu;
  j["background_hu"] = s.background_hu;
  j["node_hu"] = s.node_hu;
  j["nodes"] = json::array();
  for (const auto& n : s.nodes) {
    j["nodes"].push_back({{"center_mm", to_json(n.center_mm)}, {"radii_mm", to_json(n.radii_mm)}, {"annotated", n.annotated}});
  }
  j["organs"] = json::array();
  for (const auto& o : s.organs) {
    j["organs"].push_back({{"lo", to_json(o.lo)}, {"hi", to_json(o.hi)}, {"label", o.label}, {"hu", o.hu}});
  }
  j["models"] = json::array();
  for (const auto& m : s.models) j["models"].push_back(model_to_json(m));
  return j.dump(2);
}

void write_phantom_case(const PhantomCase& phantom, const fs::path& case_dir, const fs::path& root) {
  for (const char* sub : {"image", "labels-weak", "labels-full", "anatomy"}) fs::create_directories(case_dir / sub);
  write_volume(phantom.image, case_dir / case_layout::kImage);
  write_volume(phantom.weak_labels, case_dir / case_layout::kWeak);
  write_volume(phantom.full_labels, case_dir / case_layout::kFull);
  write_volume(phantom.anatomy, case_dir / case_layout::kAnatomy);
  {
    std::ofstream out(case_dir / "phantom.json", std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write phantom.json in " + case_dir.string());
    out << phantom_spec_to_json_text(phantom.spec) << '\n';
  }
  const auto& id = phantom.spec.case_id;
  fs::create_directories(root / "ground-truth");
  write_volume(phantom.full_labels, root / "ground-truth" / (id + ".nii.gz"));
  for (const auto& [name, pred] : phantom.predictions) {
    fs::create_directories(root / "predictions" / name);
    write_volume(pred, root / "predictions" / name / (id + ".nii.gz"));
  }
}

}  // namespace lnq
