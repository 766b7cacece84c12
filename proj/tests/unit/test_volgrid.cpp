#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "lnq/pipeline/phantom.hpp"
#include "lnq/volgrid/intensity.hpp"
#include "lnq/volgrid/io.hpp"
#include "lnq/volgrid/resample.hpp"
#include "oracles.hpp"

using namespace lnq;
namespace fs = std::filesystem;

namespace {

Image ramp(const Geometry& g) {
  Image im(g, VolumeKind::intensity, 0.0f);
  for (std::size_t i = 0; i < im.size(); ++i) im[i] = static_cast<float>(i) * 0.25f - 7.0f;
  return im;
}

void check_meta(const Geometry& a, const Geometry& b) {
  CHECK(a.dims == b.dims);
  CHECK(std::abs(a.spacing.z - b.spacing.z) <= 1e-6);
  CHECK(std::abs(a.spacing.y - b.spacing.y) <= 1e-6);
  CHECK(std::abs(a.spacing.x - b.spacing.x) <= 1e-6);
  CHECK(std::abs(a.origin.z - b.origin.z) <= 1e-6);
  CHECK(std::abs(a.origin.y - b.origin.y) <= 1e-6);
  CHECK(std::abs(a.origin.x - b.origin.x) <= 1e-6);
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("geometry rejects degenerate lattices") {
  CHECK_THROWS_AS(Image(Geometry{{0, 2, 2}, {1, 1, 1}, {}}, VolumeKind::intensity), Error);
  CHECK_THROWS_AS(Image(Geometry{{2, 2, 2}, {1, 0, 1}, {}}, VolumeKind::intensity), Error);
  CHECK_THROWS_AS(Image(Geometry{{2, 2, 2}, {1, 1, 1}, {}}, VolumeKind::intensity, std::vector<float>(7)), Error);
  const Geometry g{{2, 3, 4}, {1, 1, 1}, {}};
  CHECK(g.voxel_count() == 24);
  CHECK(g.offset(1, 2, 3) == 23);
  CHECK(g.index_of(23) == Index3{1, 2, 3});
}

TEST_CASE("raw sidecar round trip of a 4x4x4 grid") {
  const auto dir = oracle::scratch_dir("volgrid_raw");
  const Geometry g{{4, 4, 4}, {1, 1, 1}, {0, 0, 0}};
  const auto im = ramp(g);
  write_volume(im, dir / "v.json");
  CHECK(fs::exists(dir / "v.raw"));
  const auto back = read_image(dir / "v.raw");
  CHECK(back.size() == 64);
  CHECK(back == im);

  const auto sidecar = nlohmann::json::parse(std::ifstream(dir / "v.json"));
  CHECK(sidecar["format"] == "lnq-raw");
  CHECK(sidecar["dtype"] == "float32");
  CHECK(sidecar["byte_order"] == "little");
  CHECK(fs::file_size(dir / "v.raw") == 64 * 4);
}

TEST_CASE("write then read keeps data exact and metadata within 1e-6") {
  const auto dir = oracle::scratch_dir("volgrid_roundtrip");
  std::mt19937_64 rng(11);
  for (const char* ext : {".nii", ".nii.gz", ".json"}) {
    CAPTURE(ext);
    for (int trial = 0; trial < 5; ++trial) {
      std::uniform_real_distribution<double> u(0.1, 4.0);
      const Geometry g{{3 + trial, 4, 5}, {u(rng), u(rng), u(rng)}, {u(rng) - 2.0, -u(rng) * 100.0, u(rng) / 3.0}};
      Image im(g, VolumeKind::intensity, 0.0f);
      std::normal_distribution<float> n(0.0f, 300.0f);
      for (auto& v : im.data()) v = n(rng);
      const auto p = dir / ("im" + std::to_string(trial) + ext);
      write_volume(im, p);
      const auto back = read_image(p);
      check_meta(back.geometry(), g);
      CHECK(std::equal(back.data().begin(), back.data().end(), im.data().begin()));

      LabelMap lab(g, VolumeKind::label, std::uint8_t{0});
      for (auto& v : lab.data()) v = static_cast<std::uint8_t>(rng() % 105);
      const auto lp = dir / ("lab" + std::to_string(trial) + ext);
      write_volume(lab, lp);
      const auto lback = read_label_map(lp);
      check_meta(lback.geometry(), g);
      CHECK(lback.kind() == VolumeKind::label);
      CHECK(std::equal(lback.data().begin(), lback.data().end(), lab.data().begin()));
    }
  }
}

TEST_CASE("tristate kind survives both encodings") {
  const auto dir = oracle::scratch_dir("volgrid_tristate");
  LabelMap codes(Geometry{{2, 2, 2}, {1, 1, 1}, {}}, VolumeKind::tristate, std::uint8_t{2});
  codes[0] = 0;
  for (const char* name : {"t.nii.gz", "t.json"}) {
    write_volume(codes, dir / name);
    const auto v = read_volume(dir / name);
    REQUIRE(std::holds_alternative<LabelMap>(v));
    CHECK(std::get<LabelMap>(v).kind() == VolumeKind::tristate);
    CHECK(std::get<LabelMap>(v) == codes);
  }
}

TEST_CASE("compressed and uncompressed encodings of a phantom hold the same voxels") {
  const auto dir = oracle::scratch_dir("volgrid_gz");
  PhantomSpec spec;
  spec.geometry = Geometry{{10, 32, 32}, {3.0, 0.93, 0.93}, {0, 0, 0}};
  spec.seed = 99;
  spec.nodes.push_back({{15.0, 15.0, 15.0}, {5.0, 4.0, 4.0}, true});
  spec.organs.push_back({{0, 0, 0}, {9, 5, 31}, 13, -850.0f});
  const auto ph = render_phantom(spec);
  write_volume(ph.image, dir / "im.nii");
  write_volume(ph.image, dir / "im.nii.gz");
  CHECK(fs::file_size(dir / "im.nii.gz") < fs::file_size(dir / "im.nii"));
  const auto a = read_image(dir / "im.nii");
  const auto b = read_image(dir / "im.nii.gz");
  const double sa = std::accumulate(a.data().begin(), a.data().end(), 0.0);
  const double sb = std::accumulate(b.data().begin(), b.data().end(), 0.0);
  const double direct = std::accumulate(ph.image.data().begin(), ph.image.data().end(), 0.0);
  CHECK(sa == sb);
  CHECK(sa == direct);
}

TEST_CASE("identical volumes encode to identical bytes") {
  const auto dir = oracle::scratch_dir("volgrid_bytes");
  const auto im = ramp(Geometry{{3, 5, 7}, {2.5, 0.8, 0.8}, {1, 2, 3}});
  write_volume(im, dir / "a.nii.gz");
  write_volume(im, dir / "b.nii.gz");
  CHECK(slurp(dir / "a.nii.gz") == slurp(dir / "b.nii.gz"));
}

TEST_CASE("NIfTI header fields") {
  const auto dir = oracle::scratch_dir("volgrid_header");
  LabelMap lab(Geometry{{2, 3, 4}, {3.0, 0.93, 0.93}, {}}, VolumeKind::label, std::uint8_t{1});
  write_volume(lab, dir / "l.nii");
  const auto bytes = slurp(dir / "l.nii");
  REQUIRE(bytes.size() >= 352);
  auto i32 = [&](std::size_t off) {
    std::int32_t v;
    std::memcpy(&v, bytes.data() + off, 4);
    return v;
  };
  auto i16 = [&](std::size_t off) {
    std::int16_t v;
    std::memcpy(&v, bytes.data() + off, 2);
    return v;
  };
  CHECK(i32(0) == 348);
  CHECK(i16(40) == 3);  // dim[0]
  CHECK(i16(42) == 4);  // nx
  CHECK(i16(44) == 3);
  CHECK(i16(46) == 2);
  CHECK(i16(70) == 2);  // uint8
  CHECK(std::string(bytes.data() + 344, 3) == "n+1");
}

TEST_CASE("int16 NIfTI input is read") {
  // Hand-assembled minimal file: 2x1x1 int16 with scl_slope 2, inter 1.
  const auto dir = oracle::scratch_dir("volgrid_int16");
  std::vector<char> h(352, 0);
  auto put32 = [&](std::size_t off, std::int32_t v) { std::memcpy(h.data() + off, &v, 4); };
  auto put16 = [&](std::size_t off, std::int16_t v) { std::memcpy(h.data() + off, &v, 2); };
  auto putf = [&](std::size_t off, float v) { std::memcpy(h.data() + off, &v, 4); };
  put32(0, 348);
  put16(40, 3);
  put16(42, 2);
  put16(44, 1);
  put16(46, 1);
  put16(70, 4);
  put16(72, 16);
  for (int k = 0; k < 4; ++k) putf(76 + 4 * k, 1.0f);
  putf(108, 352.0f);
  putf(112, 2.0f);
  putf(116, 1.0f);
  std::memcpy(h.data() + 344, "n+1\0", 4);
  std::int16_t vals[2] = {-5, 7};
  {
    std::ofstream out(dir / "s.nii", std::ios::binary);
    out.write(h.data(), 352);
    out.write(reinterpret_cast<const char*>(vals), 4);
  }
  const auto im = read_image(dir / "s.nii");
  CHECK(im.dims() == Index3{1, 1, 2});
  CHECK(im[0] == -9.0f);
  CHECK(im[1] == 15.0f);
}

TEST_CASE("read errors are typed") {
  const auto dir = oracle::scratch_dir("volgrid_errors");
  CHECK_THROWS_AS(read_volume(dir / "missing.nii"), Error);
  CHECK_THROWS_AS(format_from_path("x.mha"), Error);
  {
    std::ofstream out(dir / "short.nii", std::ios::binary);
    out << "not a header";
  }
  try {
    (void)read_volume(dir / "short.nii");
    FAIL("expected CorruptFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptFile);
  }
  CHECK_THROWS_AS(write_volume(Image(Geometry{}, VolumeKind::intensity), dir / "nodir" / "x.nii"), Error);
  Image frac(Geometry{{1, 1, 2}, {1, 1, 1}, {}}, VolumeKind::intensity, std::vector<float>{0.5f, 1.0f});
  write_volume(frac, dir / "frac.nii");
  CHECK_THROWS_AS(read_label_map(dir / "frac.nii"), Error);
}

TEST_CASE("resample dims and exact factors") {
  const Geometry g{{10, 10, 10}, {1, 1, 1}, {0, 0, 0}};
  CHECK(resampled_dims(g, {2, 2, 2}) == Index3{5, 5, 5});
  const auto r = resample(ramp(g), {2, 2, 2}, Interpolation::trilinear);
  CHECK(r.dims() == Index3{5, 5, 5});
  CHECK(r.spacing() == Vec3{2, 2, 2});
  // Corners of the physical extent coincide.
  CHECK(r.origin().x == doctest::Approx(0.5));
  CHECK(resampled_dims(Geometry{{1, 1, 1}, {1, 1, 1}, {}}, {10, 10, 10}) == Index3{1, 1, 1});
}

TEST_CASE("constant grid resamples to the same constant") {
  for (auto mode : {Interpolation::nearest, Interpolation::trilinear}) {
    const Image c(Geometry{{7, 9, 11}, {2.0, 0.7, 0.7}, {}}, VolumeKind::intensity, 42.5f);
    const auto r = resample(c, {3.0, 0.93, 0.93}, mode);
    for (float v : r.data()) CHECK(v == 42.5f);
  }
}

TEST_CASE("nearest resample at the source spacing is the identity") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto m = oracle::random_mask(rng, 9);
    CHECK(resample(m, m.spacing()) == m);
    Image im(m.geometry(), VolumeKind::intensity, 0.0f);
    for (std::size_t i = 0; i < im.size(); ++i) im[i] = static_cast<float>(rng() % 1000);
    CHECK(resample(im, im.spacing(), Interpolation::nearest) == im);
    CHECK(resample(im, im.spacing(), Interpolation::trilinear) == im);
  }
}

TEST_CASE("nearest resample never creates new labels") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    LabelMap m(Geometry{{5, 6, 7}, {1.3, 0.9, 2.1}, {}}, VolumeKind::label, std::uint8_t{0});
    for (auto& v : m.data()) v = static_cast<std::uint8_t>(3 * (rng() % 5));
    const std::set<std::uint8_t> before(m.data().begin(), m.data().end());
    const auto r = resample(m, {0.7, 1.7, 0.5});
    for (auto v : r.data()) CHECK(before.contains(v));
  }
  const LabelMap m(Geometry{{2, 2, 2}, {1, 1, 1}, {}}, VolumeKind::label, std::uint8_t{1});
  CHECK_THROWS_AS((void)resample(m, {2, 2, 2}, Interpolation::trilinear), Error);
}

TEST_CASE("resampled sphere keeps its physical volume within 10 percent") {
  const Geometry g{{30, 30, 30}, {1, 1, 1}, {0, 0, 0}};
  const auto s = oracle::digitized_sphere(g, {14.5, 14.5, 14.5}, 8.0);
  const auto r = resample(s, {3.0, 0.93, 0.93});
  const double v0 = static_cast<double>(count_nonzero(s)) * g.voxel_volume_mm3();
  const double v1 = static_cast<double>(count_nonzero(r)) * r.geometry().voxel_volume_mm3();
  CHECK(std::abs(v1 - v0) / v0 < 0.10);
}

TEST_CASE("trilinear interpolation of a linear ramp is exact inside the volume") {
  const Geometry g{{6, 6, 6}, {1, 1, 1}, {0, 0, 0}};
  Image im(g, VolumeKind::intensity, 0.0f);
  for (std::int64_t z = 0; z < 6; ++z)
    for (std::int64_t y = 0; y < 6; ++y)
      for (std::int64_t x = 0; x < 6; ++x) im.at(z, y, x) = static_cast<float>(z + 2 * y + 3 * x);
  const auto r = resample(im, {0.5, 0.5, 0.5}, Interpolation::trilinear);
  // Output voxel (i) sits at input coordinate (i + 0.5) * 0.5 - 0.5.
  auto u = [](std::int64_t i) { return (static_cast<double>(i) + 0.5) * 0.5 - 0.5; };
  for (std::int64_t z = 1; z < 11; ++z)
    for (std::int64_t y = 1; y < 11; ++y)
      for (std::int64_t x = 1; x < 11; ++x)
        CHECK(r.at(z, y, x) == doctest::Approx(u(z) + 2 * u(y) + 3 * u(x)).epsilon(1e-6));
}

TEST_CASE("clip and standardize") {
  SUBCASE("three values") {
    const Image im(Geometry{{1, 1, 3}, {1, 1, 1}, {}}, VolumeKind::intensity, std::vector<float>{-500, 0, 1000});
    const auto out = clip_and_standardize(im, IntensityWindow(kDefaultWindowLo, kDefaultWindowHi));
    const double mean = (-150.0 + 0.0 + 350.0) / 3.0;
    const double sd = std::sqrt(((-150 - mean) * (-150 - mean) + mean * mean + (350 - mean) * (350 - mean)) / 3.0);
    CHECK(out[0] == doctest::Approx((-150 - mean) / sd));
    CHECK(out[1] == doctest::Approx((0 - mean) / sd));
    CHECK(out[2] == doctest::Approx((350 - mean) / sd));
    CHECK(std::abs(out[0] + out[1] + out[2]) <= 1e-6);
  }
  SUBCASE("all zero") {
    const Image z(Geometry{{3, 3, 3}, {1, 1, 1}, {}}, VolumeKind::intensity, 0.0f);
    const auto out = clip_and_standardize(z, IntensityWindow(-150, 350));
    for (float v : out.data()) CHECK(v == 0.0f);
  }
  SUBCASE("constant after clamping") {
    const Image z(Geometry{{3, 3, 3}, {1, 1, 1}, {}}, VolumeKind::intensity, -1000.0f);
    const auto out = clip_and_standardize(z, IntensityWindow(-150, 350));
    for (float v : out.data()) CHECK(v == 0.0f);
  }
  SUBCASE("inverted window") { CHECK_THROWS_AS(IntensityWindow(350, -150), Error); }
}

TEST_CASE("standardized phantom has zero mean, unit std and bounded range") {
  PhantomSpec spec;
  spec.seed = 3;
  spec.organs.push_back({{0, 0, 0}, {31, 20, 63}, 44, 45.0f});
  spec.organs.push_back({{0, 40, 0}, {31, 63, 30}, 7, 250.0f});
  spec.nodes.push_back({{40.0, 30.0, 30.0}, {6.0, 5.0, 5.0}, true});
  const auto ph = render_phantom(spec);
  const auto out = clip_and_standardize(ph.image, IntensityWindow(-150, 350));
  double s = 0, ss = 0;
  for (float v : out.data()) s += v;
  const double mean = s / static_cast<double>(out.size());
  for (float v : out.data()) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.size()));
  CHECK(std::abs(mean) <= 1e-6);
  CHECK(std::abs(sd - 1.0) <= 1e-6);

  // Recompute the statistics of the clamped input directly.
  double cs = 0, css = 0;
  for (float v : ph.image.data()) cs += std::clamp<double>(v, -150, 350);
  const double cmean = cs / static_cast<double>(out.size());
  for (float v : ph.image.data()) css += std::pow(std::clamp<double>(v, -150, 350) - cmean, 2);
  const double csd = std::sqrt(css / static_cast<double>(out.size()));
  const auto [mn, mx] = std::minmax_element(out.data().begin(), out.data().end());
  CHECK(*mn >= (-150 - cmean) / csd - 1e-5);
  CHECK(*mx <= (350 - cmean) / csd + 1e-5);
}
