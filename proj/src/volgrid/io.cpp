#include "lnq/volgrid/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "json.hpp"

namespace lnq {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little, "volume I/O assumes a little-endian host");

enum class Dtype { u8, i16, f32 };

std::size_t dtype_size(Dtype t) {
  switch (t) {
    case Dtype::u8: return 1;
    case Dtype::i16: return 2;
    case Dtype::f32: return 4;
  }
  return 1;
}

struct Decoded {
  Geometry geometry;
  VolumeKind kind = VolumeKind::intensity;
  Dtype dtype = Dtype::f32;
  double slope = 1.0;
  double intercept = 0.0;
  std::vector<unsigned char> payload;

  [[nodiscard]] double value(std::size_t i) const {
    double v = 0.0;
    switch (dtype) {
      case Dtype::u8: v = payload[i]; break;
      case Dtype::i16: {
        std::int16_t s;
        std::memcpy(&s, payload.data() + 2 * i, 2);
        v = s;
        break;
      }
      case Dtype::f32: {
        float f;
        std::memcpy(&f, payload.data() + 4 * i, 4);
        v = f;
        break;
      }
    }
    return v * slope + intercept;
  }
};

// ---------------------------------------------------------------------------
// NIfTI-1

#pragma pack(push, 1)
struct NiftiHeader {
  std::int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1;
  float intent_p2;
  float intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max;
  float cal_min;
  float slice_duration;
  float toffset;
  std::int32_t glmax;
  std::int32_t glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code;
  std::int16_t sform_code;
  float quatern_b;
  float quatern_c;
  float quatern_d;
  float qoffset_x;
  float qoffset_y;
  float qoffset_z;
  float srow_x[4];
  float srow_y[4];
  float srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(NiftiHeader) == 348);

constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;
constexpr std::int16_t kIntentLabel = 1002;
constexpr std::int32_t kEcodeComment = 6;
constexpr std::int32_t kVoxOffset = 352;
constexpr char kTristateTag[] = "lnq:tristate";

std::vector<unsigned char> gz_slurp(const fs::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (f == nullptr) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<unsigned char> out;
  std::vector<unsigned char> chunk(1 << 20);
  for (;;) {
    const int n = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      gzclose(f);
      throw Error(ErrorCode::CorruptFile, "decompression failed for " + path.string());
    }
    if (n == 0) break;
    out.insert(out.end(), chunk.begin(), chunk.begin() + n);
  }
  gzclose(f);
  return out;
}

void gz_dump(const fs::path& path, std::span<const unsigned char> bytes, bool compress) {
  // "T" writes without compression; level 6 keeps output deterministic and
  // zlib emits a fixed gzip header (no name, zero mtime).
  gzFile f = gzopen(path.string().c_str(), compress ? "wb6" : "wbT");
  if (f == nullptr) throw Error(ErrorCode::Io, "cannot create " + path.string());
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto n = static_cast<unsigned>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    if (gzwrite(f, bytes.data() + pos, n) != static_cast<int>(n)) {
      gzclose(f);
      throw Error(ErrorCode::Io, "write failed for " + path.string());
    }
    pos += n;
  }
  if (gzclose(f) != Z_OK) throw Error(ErrorCode::Io, "close failed for " + path.string());
}

Decoded decode_nifti(const fs::path& path) {
  const auto bytes = gz_slurp(path);
  if (bytes.size() < sizeof(NiftiHeader)) {
    throw Error(ErrorCode::CorruptFile, "truncated NIfTI header in " + path.string());
  }
  NiftiHeader h;
  std::memcpy(&h, bytes.data(), sizeof h);
  if (h.sizeof_hdr != 348) {
    throw Error(ErrorCode::UnsupportedFormat, "not a little-endian NIfTI-1 file: " + path.string());
  }
  if (std::memcmp(h.magic, "n+1", 4) != 0) {
    throw Error(ErrorCode::UnsupportedFormat, "only single-file NIfTI-1 (n+1) is supported");
  }
  const int ndim = h.dim[0];
  if (ndim < 1 || ndim > 7) throw Error(ErrorCode::CorruptFile, "bad dim[0] in " + path.string());
  for (int i = 4; i <= ndim; ++i) {
    if (h.dim[i] > 1) throw Error(ErrorCode::UnsupportedFormat, "volumes with more than 3 dimensions");
  }

  Decoded d;
  auto dim_at = [&](int i) -> std::int64_t { return i <= ndim ? std::max<std::int16_t>(h.dim[i], 1) : 1; };
  auto pix_at = [&](int i) -> double {
    const double p = i <= ndim ? std::fabs(h.pixdim[i]) : 1.0;
    return p > 0.0 ? p : 1.0;
  };
  d.geometry.dims = {dim_at(3), dim_at(2), dim_at(1)};
  d.geometry.spacing = {pix_at(3), pix_at(2), pix_at(1)};
  if (h.sform_code > 0) {
    d.geometry.origin = {h.srow_z[3], h.srow_y[3], h.srow_x[3]};
  } else {
    d.geometry.origin = {h.qoffset_z, h.qoffset_y, h.qoffset_x};
  }

  switch (h.datatype) {
    case kDtUint8: d.dtype = Dtype::u8; break;
    case kDtInt16: d.dtype = Dtype::i16; break;
    case kDtFloat32: d.dtype = Dtype::f32; break;
    default:
      throw Error(ErrorCode::UnsupportedFormat,
                  "unsupported NIfTI datatype " + std::to_string(h.datatype) + " in " + path.string());
  }
  if (h.scl_slope != 0.0f && std::isfinite(h.scl_slope)) {
    d.slope = h.scl_slope;
    d.intercept = std::isfinite(h.scl_inter) ? h.scl_inter : 0.0;
  }

  std::string descrip(h.descrip, strnlen(h.descrip, sizeof h.descrip));
  if (descrip.find(kTristateTag) != std::string::npos) {
    d.kind = VolumeKind::tristate;
  } else if (h.intent_code == kIntentLabel) {
    d.kind = VolumeKind::label;
  }

  const auto vox_offset = static_cast<std::size_t>(h.vox_offset);
  // Exact metadata written by this library rides in a comment extension.
  if (vox_offset >= 352 && bytes.size() >= 352 && bytes[348] != 0) {
    std::size_t pos = 352;
    while (pos + 8 <= vox_offset) {
      std::int32_t esize, ecode;
      std::memcpy(&esize, bytes.data() + pos, 4);
      std::memcpy(&ecode, bytes.data() + pos + 4, 4);
      if (esize < 8 || pos + static_cast<std::size_t>(esize) > vox_offset) break;
      if (ecode == kEcodeComment) {
        std::string text(reinterpret_cast<const char*>(bytes.data() + pos + 8),
                         static_cast<std::size_t>(esize) - 8);
        text.resize(strnlen(text.c_str(), text.size()));
        const auto meta = json::parse(text, nullptr, false);
        if (meta.is_object() && meta.contains("lnq")) {
          const auto& m = meta["lnq"];
          const auto sp = m.at("spacing").get<std::array<double, 3>>();
          const auto og = m.at("origin").get<std::array<double, 3>>();
          // Only trust the exact values if they agree with the header.
          if (std::fabs(sp[0] - d.geometry.spacing.z) < 1e-3 &&
              std::fabs(sp[1] - d.geometry.spacing.y) < 1e-3 &&
              std::fabs(sp[2] - d.geometry.spacing.x) < 1e-3) {
            d.geometry.spacing = {sp[0], sp[1], sp[2]};
            d.geometry.origin = {og[0], og[1], og[2]};
          }
        }
      }
      pos += static_cast<std::size_t>(esize);
    }
  }

  d.geometry.validate();
  const std::size_t need = d.geometry.voxel_count() * dtype_size(d.dtype);
  if (vox_offset < sizeof(NiftiHeader) || bytes.size() - std::min(bytes.size(), vox_offset) != need) {
    throw Error(ErrorCode::DimensionMismatch,
                "payload size does not match header dims in " + path.string());
  }
  d.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(vox_offset), bytes.end());
  return d;
}

void encode_nifti(const fs::path& path, const Geometry& g, VolumeKind kind, Dtype dtype,
                  std::span<const unsigned char> payload, bool compress) {
  NiftiHeader h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  if (g.dims.x > 32767 || g.dims.y > 32767 || g.dims.z > 32767) {
    throw Error(ErrorCode::InvalidArgument, "dims exceed NIfTI-1 limits");
  }
  h.dim[1] = static_cast<std::int16_t>(g.dims.x);
  h.dim[2] = static_cast<std::int16_t>(g.dims.y);
  h.dim[3] = static_cast<std::int16_t>(g.dims.z);
  for (int i = 4; i < 8; ++i) h.dim[i] = 1;
  h.datatype = dtype == Dtype::u8 ? kDtUint8 : dtype == Dtype::i16 ? kDtInt16 : kDtFloat32;
  h.bitpix = static_cast<std::int16_t>(8 * dtype_size(dtype));
  h.pixdim[0] = 1.0f;
  h.pixdim[1] = static_cast<float>(g.spacing.x);
  h.pixdim[2] = static_cast<float>(g.spacing.y);
  h.pixdim[3] = static_cast<float>(g.spacing.z);
  for (int i = 4; i < 8; ++i) h.pixdim[i] = 1.0f;
  h.vox_offset = 0.0f;  // patched below once the extension size is known
  h.scl_slope = 1.0f;
  h.xyzt_units = 2;  // millimetres
  if (kind != VolumeKind::intensity) h.intent_code = kIntentLabel;
  if (kind == VolumeKind::tristate) std::memcpy(h.descrip, kTristateTag, sizeof kTristateTag);
  h.qform_code = 1;
  h.sform_code = 1;
  h.qoffset_x = static_cast<float>(g.origin.x);
  h.qoffset_y = static_cast<float>(g.origin.y);
  h.qoffset_z = static_cast<float>(g.origin.z);
  h.srow_x[0] = h.pixdim[1];
  h.srow_y[1] = h.pixdim[2];
  h.srow_z[2] = h.pixdim[3];
  h.srow_x[3] = h.qoffset_x;
  h.srow_y[3] = h.qoffset_y;
  h.srow_z[3] = h.qoffset_z;
  std::memcpy(h.magic, "n+1", 4);

  json meta = {{"lnq",
                {{"spacing", {g.spacing.z, g.spacing.y, g.spacing.x}},
                 {"origin", {g.origin.z, g.origin.y, g.origin.x}},
                 {"kind", to_string(kind)}}}};
  std::string text = meta.dump();
  const std::size_t esize = ((text.size() + 1 + 8 + 15) / 16) * 16;
  text.resize(esize - 8, '\0');

  const std::size_t vox_offset = kVoxOffset + esize;
  h.vox_offset = static_cast<float>(vox_offset);

  std::vector<unsigned char> out(vox_offset + payload.size(), 0);
  std::memcpy(out.data(), &h, sizeof h);
  out[348] = 1;  // extension flag
  const auto esize32 = static_cast<std::int32_t>(esize);
  std::memcpy(out.data() + 352, &esize32, 4);
  std::memcpy(out.data() + 356, &kEcodeComment, 4);
  std::memcpy(out.data() + 360, text.data(), text.size());
  std::copy(payload.begin(), payload.end(), out.begin() + static_cast<std::ptrdiff_t>(vox_offset));
  gz_dump(path, out, compress);
}

// ---------------------------------------------------------------------------
// Raw payload + JSON sidecar

constexpr char kRawFormatName[] = "lnq-raw";

std::pair<fs::path, fs::path> raw_pair(const fs::path& path) {
  fs::path sidecar = path;
  fs::path payload = path;
  sidecar.replace_extension(".json");
  payload.replace_extension(".raw");
  return {sidecar, payload};
}

std::string dtype_name(Dtype t) {
  switch (t) {
    case Dtype::u8: return "uint8";
    case Dtype::i16: return "int16";
    case Dtype::f32: return "float32";
  }
  return "float32";
}

Dtype dtype_from_name(const std::string& s) {
  if (s == "uint8") return Dtype::u8;
  if (s == "int16") return Dtype::i16;
  if (s == "float32") return Dtype::f32;
  throw Error(ErrorCode::UnsupportedFormat, "unsupported raw dtype '" + s + "'");
}

Decoded decode_raw(const fs::path& path) {
  const auto [sidecar_path, default_payload] = raw_pair(path);
  std::ifstream in(sidecar_path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + sidecar_path.string());
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, sidecar_path.string() + ": " + e.what());
  }

  Decoded d;
  try {
    if (meta.at("format").get<std::string>() != kRawFormatName) {
      throw Error(ErrorCode::UnsupportedFormat, "sidecar format is not " + std::string(kRawFormatName));
    }
    if (meta.value("byte_order", std::string("little")) != "little") {
      throw Error(ErrorCode::UnsupportedFormat, "only little-endian raw payloads are supported");
    }
    const auto dims = meta.at("dims").get<std::array<std::int64_t, 3>>();
    const auto sp = meta.at("spacing").get<std::array<double, 3>>();
    const auto og = meta.at("origin").get<std::array<double, 3>>();
    d.geometry = {{dims[0], dims[1], dims[2]}, {sp[0], sp[1], sp[2]}, {og[0], og[1], og[2]}};
    d.kind = volume_kind_from_string(meta.at("kind").get<std::string>());
    d.dtype = dtype_from_name(meta.at("dtype").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, sidecar_path.string() + ": " + e.what());
  }
  d.geometry.validate();

  fs::path payload_path = default_payload;
  if (meta.contains("payload")) payload_path = sidecar_path.parent_path() / meta["payload"].get<std::string>();
  std::ifstream raw(payload_path, std::ios::binary);
  if (!raw) throw Error(ErrorCode::Io, "cannot open " + payload_path.string());
  d.payload.assign(std::istreambuf_iterator<char>(raw), std::istreambuf_iterator<char>());
  if (d.payload.size() != d.geometry.voxel_count() * dtype_size(d.dtype)) {
    throw Error(ErrorCode::DimensionMismatch,
                "payload size does not match sidecar dims in " + payload_path.string());
  }
  return d;
}

void encode_raw(const fs::path& path, const Geometry& g, VolumeKind kind, Dtype dtype,
                std::span<const unsigned char> payload) {
  const auto [sidecar_path, payload_path] = raw_pair(path);
  json meta;
  meta["format"] = kRawFormatName;
  meta["version"] = 1;
  meta["dims"] = {g.dims.z, g.dims.y, g.dims.x};
  meta["spacing"] = {g.spacing.z, g.spacing.y, g.spacing.x};
  meta["origin"] = {g.origin.z, g.origin.y, g.origin.x};
  meta["kind"] = to_string(kind);
  meta["dtype"] = dtype_name(dtype);
  meta["byte_order"] = "little";
  meta["payload"] = payload_path.filename().string();

  std::ofstream side(sidecar_path, std::ios::trunc);
  if (!side) throw Error(ErrorCode::Io, "cannot create " + sidecar_path.string());
  side << meta.dump(2) << '\n';
  std::ofstream raw(payload_path, std::ios::binary | std::ios::trunc);
  if (!raw) throw Error(ErrorCode::Io, "cannot create " + payload_path.string());
  raw.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!side || !raw) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Decoded decode(const fs::path& path) {
  if (!fs::exists(path) && format_from_path(path) != VolumeFormat::raw) {
    throw Error(ErrorCode::Io, "no such file: " + path.string());
  }
  switch (format_from_path(path)) {
    case VolumeFormat::nifti:
    case VolumeFormat::nifti_gz: return decode_nifti(path);
    case VolumeFormat::raw: return decode_raw(path);
  }
  return {};
}

void encode(const fs::path& path, const Geometry& g, VolumeKind kind, Dtype dtype,
            std::span<const unsigned char> payload) {
  if (path.has_parent_path() && !fs::is_directory(path.parent_path())) {
    throw Error(ErrorCode::Io, "parent directory does not exist: " + path.parent_path().string());
  }
  switch (format_from_path(path)) {
    case VolumeFormat::nifti: encode_nifti(path, g, kind, dtype, payload, false); break;
    case VolumeFormat::nifti_gz: encode_nifti(path, g, kind, dtype, payload, true); break;
    case VolumeFormat::raw: encode_raw(path, g, kind, dtype, payload); break;
  }
}

Image to_image(const Decoded& d) {
  std::vector<float> out(d.geometry.voxel_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(d.value(i));
  return Image(d.geometry, d.kind, std::move(out));
}

LabelMap to_labels(const Decoded& d, const fs::path& path) {
  std::vector<std::uint8_t> out(d.geometry.voxel_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = d.value(i);
    if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v)) {
      throw Error(ErrorCode::UnsupportedFormat,
                  "label volume holds a non-integer or out-of-range value: " + path.string());
    }
    out[i] = static_cast<std::uint8_t>(v);
  }
  const auto kind = d.kind == VolumeKind::intensity ? VolumeKind::label : d.kind;
  return LabelMap(d.geometry, kind, std::move(out));
}

}  // namespace

VolumeFormat format_from_path(const fs::path& path) {
  const std::string name = path.filename().string();
  auto ends_with = [&](std::string_view suffix) {
    return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".nii.gz")) return VolumeFormat::nifti_gz;
  if (ends_with(".nii")) return VolumeFormat::nifti;
  if (ends_with(".raw") || ends_with(".json")) return VolumeFormat::raw;
  throw Error(ErrorCode::UnsupportedFormat, "unrecognised volume extension: " + name);
}

AnyVolume read_volume(const fs::path& path) {
  const auto d = decode(path);
  if (d.kind == VolumeKind::intensity) return to_image(d);
  return to_labels(d, path);
}

Image read_image(const fs::path& path) { return to_image(decode(path)); }

LabelMap read_label_map(const fs::path& path) { return to_labels(decode(path), path); }

void write_volume(const Image& image, const fs::path& path) {
  const auto data = image.data();
  std::span<const unsigned char> bytes(reinterpret_cast<const unsigned char*>(data.data()), data.size_bytes());
  encode(path, image.geometry(), image.kind(), Dtype::f32, bytes);
}

void write_volume(const LabelMap& labels, const fs::path& path) {
  const auto data = labels.data();
  encode(path, labels.geometry(), labels.kind(), Dtype::u8, {data.data(), data.size()});
}

}  // namespace lnq
