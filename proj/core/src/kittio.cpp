// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxalign/kittio.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "voxalign/error.hpp"

namespace voxalign {
namespace {

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void put_real(Bytes& out, double v, ElementType type) {
  if (type == ElementType::F64) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
  } else {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
}

double get_real(const std::uint8_t* p, ElementType type) {
  if (type == ElementType::F64) return std::bit_cast<double>(get_u64(p));
  return static_cast<double>(std::bit_cast<float>(get_u32(p)));
}

std::string kind_name(PayloadKind k) {
  switch (k) {
    case PayloadKind::Labels: return "labels";
    case PayloadKind::Scores: return "scores";
    case PayloadKind::Features: return "features";
    case PayloadKind::Anisotropy: return "anisotropy";
  }
  return "unknown";
}

void expect_kind(const GridContainer& c, PayloadKind kind) {
  if (c.kind != kind) {
    throw FormatError("container holds " + kind_name(c.kind) + ", expected " + kind_name(kind));
  }
}

void expect_dims(const GridContainer& c, const GridGeometry& geometry) {
  if (!(c.dims == geometry.dims)) {
    throw FormatError("container dims " + c.dims.to_string() + " do not match expected " +
                      geometry.dims.to_string());
  }
}

bool is_real(ElementType t) { return t == ElementType::F32 || t == ElementType::F64; }

std::vector<double> real_payload(const GridContainer& c) {
  if (!is_real(c.element)) throw FormatError("container payload is not floating point");
  const std::size_t es = element_size(c.element);
  std::vector<double> out(c.payload.size() / es);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = get_real(c.payload.data() + i * es, c.element);
  return out;
}

GridContainer real_container(PayloadKind kind, GridDims dims, std::uint32_t channels,
                             const std::vector<double>& values, ElementType element) {
  if (!is_real(element)) throw ValidationError("real payload needs f32 or f64 elements");
  GridContainer c{kind, element, dims, channels, {}};
  c.payload.reserve(values.size() * element_size(element));
  for (double v : values) put_real(c.payload, v, element);
  c.validate();
  return c;
}

}  // namespace

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());
  return data;
}

std::string read_text_file(const std::filesystem::path& path) {
  const Bytes b = read_file(path);
  return std::string(b.begin(), b.end());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

// ---------------------------------------------------------------------------

LabelMapping LabelMapping::semantic_kitti() {
  LabelMapping m;
  m.table = ClassTable::semantic_kitti();
  m.raw_to_train = {
      {0, 0},    {1, 0},    {10, 1},   {11, 2},   {13, 5},   {15, 3},   {16, 5},
      {18, 4},   {20, 5},   {30, 6},   {31, 7},   {32, 8},   {40, 9},   {44, 10},
      {48, 11},  {49, 12},  {50, 13},  {51, 14},  {52, 0},   {60, 9},   {70, 15},
      {71, 16},  {72, 17},  {80, 18},  {81, 19},  {99, 0},   {252, 1},  {253, 7},
      {254, 6},  {255, 8},  {256, 5},  {257, 5},  {258, 4},  {259, 5},
  };
  return m;
}

LabelMapping LabelMapping::identity(const ClassTable& table) {
  table.validate();
  LabelMapping m;
  m.table = table;
  for (std::size_t c = 0; c < table.count(); ++c) {
    m.raw_to_train.emplace(static_cast<std::uint32_t>(c), static_cast<Label>(c));
  }
  return m;
}

LabelMapping LabelMapping::from_json(std::string_view text) {
  LabelMapping m;
  try {
    const auto doc = nlohmann::json::parse(text);
    m.table.names = doc.at("names").get<std::vector<std::string>>();
    for (const auto& [key, value] : doc.at("map").items()) {
      std::size_t used = 0;
      const unsigned long raw = std::stoul(key, &used);
      if (used != key.size() || raw > std::numeric_limits<std::uint32_t>::max()) {
        throw ParseError("mapping key '" + key + "' is not an unsigned id");
      }
      m.raw_to_train[static_cast<std::uint32_t>(raw)] = value.get<Label>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("class mapping: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ParseError("class mapping: non-numeric raw id");
  } catch (const std::out_of_range&) {
    throw ParseError("class mapping: raw id out of range");
  }
  m.table.validate();
  for (const auto& [raw, train] : m.raw_to_train) {
    if (train >= m.table.count()) {
      throw MappingError("raw id " + std::to_string(raw) + " maps to training id " +
                         std::to_string(train) + " beyond the class names");
    }
  }
  return m;
}

Label LabelMapping::map(std::uint32_t raw) const {
  const auto it = raw_to_train.find(raw);
  if (it == raw_to_train.end()) {
    throw MappingError("raw label id " + std::to_string(raw) + " is not in the class mapping");
  }
  return it->second;
}

BoolGrid unpack_bits(std::span<const std::uint8_t> bytes, GridDims dims) {
  dims.validate();
  const std::size_t n = dims.count();
  const std::size_t expected = (n + 7) / 8;
  if (bytes.size() != expected) {
    throw FormatError("bit-packed voxel file has " + std::to_string(bytes.size()) +
                      " bytes, expected " + std::to_string(expected) + " for " +
                      dims.to_string());
  }
  BoolGrid g = BoolGrid::filled(dims, false);
  for (std::size_t i = 0; i < n; ++i) {
    g.values[i] = (bytes[i >> 3] >> (7 - (i & 7))) & 1u;
  }
  return g;
}

Bytes pack_bits(const BoolGrid& grid) {
  const std::size_t n = grid.dims.count();
  if (grid.values.size() != n) throw ShapeError("mask size does not match its dims");
  Bytes out((n + 7) / 8, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (grid.values[i]) out[i >> 3] |= static_cast<std::uint8_t>(0x80u >> (i & 7));
  }
  return out;
}

LabelGrid read_occupancy_bin(std::span<const std::uint8_t> bytes, const GridGeometry& geom) {
  const BoolGrid bits = unpack_bits(bytes, geom.dims);
  LabelGrid g = LabelGrid::filled(geom, ClassTable::kEmpty);
  for (std::size_t i = 0; i < bits.values.size(); ++i) g.labels[i] = bits.values[i];
  return g;
}

Bytes write_occupancy_bin(const LabelGrid& grid) {
  grid.validate();
  BoolGrid bits = BoolGrid::filled(grid.dims(), false);
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    bits.values[i] = grid.labels[i] != ClassTable::kEmpty ? 1 : 0;
  }
  return pack_bits(bits);
}

LabelGrid read_labels(std::span<const std::uint8_t> bytes, const LabelMapping& mapping,
                      const GridGeometry& geom) {
  geom.validate();
  const std::size_t n = geom.dims.count();
  if (bytes.size() != n * 2) {
    throw FormatError(".label file has " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(n * 2) + " for " + geom.dims.to_string());
  }
  LabelGrid g = LabelGrid::filled(geom, ClassTable::kEmpty);
  for (std::size_t i = 0; i < n; ++i) g.labels[i] = mapping.map(get_u16(bytes.data() + 2 * i));
  return g;
}

Bytes write_labels(const LabelGrid& grid) {
  grid.validate();
  Bytes out;
  out.reserve(grid.labels.size() * 2);
  for (Label l : grid.labels) put_u16(out, l);
  return out;
}

VoxelFileBundle VoxelFileBundle::discover(const std::filesystem::path& voxel_dir,
                                          const std::string& frame) {
  VoxelFileBundle b;
  auto pick = [&](const char* ext) -> std::optional<std::filesystem::path> {
    auto p = voxel_dir / (frame + ext);
    if (std::filesystem::exists(p)) return p;
    return std::nullopt;
  };
  b.occupancy = pick(".bin");
  b.labels = pick(".label");
  b.invalid = pick(".invalid");
  return b;
}

LabelGrid load_voxel_bundle(const VoxelFileBundle& bundle, const LabelMapping& mapping,
                            const GridGeometry& geom) {
  if (!bundle.occupancy && !bundle.labels && !bundle.invalid) {
    throw IoError("voxel bundle names no files");
  }
  LabelGrid g = LabelGrid::filled(geom, ClassTable::kEmpty);
  if (bundle.labels) {
    g = read_labels(read_file(*bundle.labels), mapping, geom);
  } else if (bundle.occupancy) {
    g = read_occupancy_bin(read_file(*bundle.occupancy), geom);
  }
  if (bundle.invalid) g.invalid_mask = unpack_bits(read_file(*bundle.invalid), geom.dims).values;
  return g;
}

// ---------------------------------------------------------------------------

CameraRig read_calibration(std::string_view text, ImageSize size) {
  std::map<std::string, std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t\r") + 1);
    std::istringstream vals(line.substr(colon + 1));
    std::vector<double> v;
    std::string tok;
    while (vals >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("calibration line " + std::to_string(line_no) + ": '" + tok +
                         "' is not a number");
      }
    }
    rows[key] = std::move(v);
  }
  for (const char* key : {"P2", "Tr"}) {
    const auto it = rows.find(key);
    if (it == rows.end()) throw ParseError(std::string("calibration lacks a ") + key + ": line");
    if (it->second.size() != 12) {
      throw ParseError(std::string("calibration ") + key + " has " +
                       std::to_string(it->second.size()) + " values, expected 12");
    }
  }
  const auto& p2 = rows["P2"];
  const auto& tr = rows["Tr"];
  Mat3 K, R;
  Vec3 p2_offset, t;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      K(r, c) = p2[r * 4 + c];
      R(r, c) = tr[r * 4 + c];
    }
    p2_offset(r) = p2[r * 4 + 3];
    t(r) = tr[r * 4 + 3];
  }
  if (K(1, 0) != 0.0 || K(2, 0) != 0.0 || K(2, 1) != 0.0 || K(2, 2) != 1.0 ||
      !(K(0, 0) > 0.0) || !(K(1, 1) > 0.0)) {
    throw ValidationError("P2 does not factor into a pinhole intrinsics matrix");
  }
  const CameraRig probe = CameraRig::make(K, R, t, size, 1e-6);
  return CameraRig::make(K, R, t + probe.K_inverse() * p2_offset, size, 1e-6);
}

std::string write_calibration(const CameraRig& rig) {
  std::string out;
  char buf[64];
  auto emit = [&](const char* key, const Mat3& m, const Vec3& col) {
    out += key;
    out += ":";
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        std::snprintf(buf, sizeof(buf), " %.17g", c < 3 ? m(r, c) : col(r));
        out += buf;
      }
    }
    out += "\n";
  };
  emit("P2", rig.K(), Vec3::Zero());
  emit("Tr", rig.R(), rig.t());
  return out;
}

// ---------------------------------------------------------------------------

std::size_t element_size(ElementType type) {
  switch (type) {
    case ElementType::U16: return 2;
    case ElementType::F32: return 4;
    case ElementType::F64: return 8;
    case ElementType::Bool: return 1;
  }
  throw FormatError("unknown element type");
}

void GridContainer::validate() const {
  dims.validate();
  if (channels == 0) throw ValidationError("container needs at least one channel");
  const std::size_t expected = dims.count() * channels * element_size(element);
  if (payload.size() != expected) {
    throw ValidationError("container payload has " + std::to_string(payload.size()) +
                          " bytes, expected " + std::to_string(expected));
  }
}

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = ::crc32(crc, bytes.data() + offset, static_cast<uInt>(chunk));
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

Bytes write_container(const GridContainer& container) {
  container.validate();
  Bytes out;
  out.reserve(kContainerHeaderSize + container.payload.size() + 4);
  for (char ch : std::string_view("VXAL")) out.push_back(static_cast<std::uint8_t>(ch));
  put_u16(out, kContainerVersion);
  out.push_back(static_cast<std::uint8_t>(container.kind));
  put_u32(out, static_cast<std::uint32_t>(container.dims.x));
  put_u32(out, static_cast<std::uint32_t>(container.dims.y));
  put_u32(out, static_cast<std::uint32_t>(container.dims.z));
  put_u32(out, container.channels);
  out.push_back(static_cast<std::uint8_t>(container.element));
  out.insert(out.end(), container.payload.begin(), container.payload.end());
  put_u32(out, crc32_ieee(out));
  return out;
}

GridContainer read_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kContainerHeaderSize + 4) {
    throw FormatError("container truncated: " + std::to_string(bytes.size()) + " bytes");
  }
  const std::uint8_t* p = bytes.data();
  if (std::memcmp(p, "VXAL", 4) != 0) throw FormatError("bad container magic");
  const std::uint16_t version = get_u16(p + 4);
  if (version != kContainerVersion) {
    throw FormatError("unsupported container version " + std::to_string(version));
  }
  const std::uint8_t kind = p[6];
  if (kind < 1 || kind > 4) throw FormatError("unknown payload kind " + std::to_string(kind));
  const std::uint32_t dx = get_u32(p + 7);
  const std::uint32_t dy = get_u32(p + 11);
  const std::uint32_t dz = get_u32(p + 15);
  const std::uint32_t channels = get_u32(p + 19);
  const std::uint8_t elem = p[23];
  if (elem < 1 || elem > 4) throw FormatError("unknown element type " + std::to_string(elem));

  constexpr std::uint64_t kMaxVoxels = std::numeric_limits<std::int32_t>::max();
  if (dx == 0 || dy == 0 || dz == 0 || dx > kMaxVoxels || dy > kMaxVoxels || dz > kMaxVoxels) {
    throw FormatError("container dims out of range");
  }
  const std::uint64_t voxels = static_cast<std::uint64_t>(dx) * dy;
  if (voxels > kMaxVoxels || voxels * dz > kMaxVoxels) {
    throw FormatError("container grid exceeds 2^31 voxels");
  }
  if (channels == 0) throw FormatError("container declares zero channels");
  const std::uint64_t body = bytes.size() - kContainerHeaderSize - 4;
  const std::uint64_t per_voxel =
      static_cast<std::uint64_t>(channels) * element_size(static_cast<ElementType>(elem));
  if (per_voxel > body || voxels * dz * per_voxel != body) {
    throw FormatError("container payload length " + std::to_string(body) +
                      " does not match its header");
  }
  const std::uint32_t stored = get_u32(p + bytes.size() - 4);
  const std::uint32_t actual = crc32_ieee(bytes.first(bytes.size() - 4));
  if (stored != actual) throw FormatError("container checksum mismatch");

  GridContainer c;
  c.kind = static_cast<PayloadKind>(kind);
  c.element = static_cast<ElementType>(elem);
  c.dims = GridDims{static_cast<std::int32_t>(dx), static_cast<std::int32_t>(dy),
                    static_cast<std::int32_t>(dz)};
  c.channels = channels;
  c.payload.assign(bytes.begin() + kContainerHeaderSize, bytes.end() - 4);
  return c;
}

GridContainer to_container(const LabelGrid& grid) {
  grid.validate();
  const std::uint32_t channels = grid.invalid_mask ? 2 : 1;
  GridContainer c{PayloadKind::Labels, ElementType::U16, grid.dims(), channels, {}};
  c.payload.reserve(grid.labels.size() * channels * 2);
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    put_u16(c.payload, grid.labels[i]);
    if (grid.invalid_mask) put_u16(c.payload, (*grid.invalid_mask)[i] ? 1 : 0);
  }
  c.validate();
  return c;
}

GridContainer to_container(const BoolGrid& grid) {
  if (grid.values.size() != grid.dims.count()) throw ShapeError("mask size does not match dims");
  GridContainer c{PayloadKind::Labels, ElementType::Bool, grid.dims, 1, {}};
  c.payload.reserve(grid.values.size());
  for (auto v : grid.values) c.payload.push_back(v ? 1 : 0);
  c.validate();
  return c;
}

GridContainer to_container(const ScoreGrid& grid, ElementType element) {
  grid.validate();
  return real_container(PayloadKind::Scores, grid.geometry.dims, 1, grid.scores, element);
}

GridContainer to_container(const FeatureGrid& grid, ElementType element) {
  grid.validate();
  return real_container(PayloadKind::Features, grid.geometry.dims,
                        static_cast<std::uint32_t>(grid.channels), grid.values, element);
}

GridContainer to_container(const AnisotropyMap& map) {
  map.validate();
  std::vector<double> values;
  values.reserve(map.s_csa.size() * 4);
  for (std::size_t i = 0; i < map.s_csa.size(); ++i) {
    values.push_back(map.s_surface[i]);
    values.push_back(map.s_edge[i]);
    values.push_back(map.s_vertex[i]);
    values.push_back(map.s_csa[i]);
  }
  return real_container(PayloadKind::Anisotropy, map.geometry.dims, 4, values, ElementType::F64);
}

GridContainer to_container(const FeatureMap2D& map, ElementType element) {
  map.validate();
  return real_container(PayloadKind::Features, GridDims{map.height, map.width, 1},
                        static_cast<std::uint32_t>(map.channels), map.values, element);
}

GridContainer to_container(const DepthMap& map) {
  map.validate();
  return real_container(PayloadKind::Features, GridDims{map.height, map.width, 1}, 1, map.depth,
                        ElementType::F64);
}

GridContainer to_container(const Matrix& matrix) {
  if (matrix.rows == 0 || matrix.cols == 0) throw ValidationError("cannot store an empty matrix");
  if (matrix.rows > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw ValidationError("matrix has too many rows for a container");
  }
  return real_container(PayloadKind::Features,
                        GridDims{static_cast<std::int32_t>(matrix.rows), 1, 1},
                        static_cast<std::uint32_t>(matrix.cols), matrix.values, ElementType::F64);
}

LabelGrid labels_from_container(const GridContainer& c, const GridGeometry& geometry) {
  expect_kind(c, PayloadKind::Labels);
  expect_dims(c, geometry);
  if (c.element != ElementType::U16 || (c.channels != 1 && c.channels != 2)) {
    throw FormatError("label container must hold 1 or 2 u16 channels");
  }
  LabelGrid g = LabelGrid::filled(geometry, ClassTable::kEmpty);
  if (c.channels == 2) g.invalid_mask.emplace(g.labels.size(), 0);
  for (std::size_t i = 0; i < g.labels.size(); ++i) {
    g.labels[i] = get_u16(c.payload.data() + i * c.channels * 2);
    if (c.channels == 2) {
      const std::uint16_t flag = get_u16(c.payload.data() + i * 4 + 2);
      if (flag > 1) throw FormatError("invalid-mask channel holds a non-boolean value");
      (*g.invalid_mask)[i] = static_cast<std::uint8_t>(flag);
    }
  }
  return g;
}

BoolGrid mask_from_container(const GridContainer& c) {
  expect_kind(c, PayloadKind::Labels);
  if (c.element != ElementType::Bool || c.channels != 1) {
    throw FormatError("mask container must hold one bool channel");
  }
  BoolGrid g{c.dims, c.payload};
  for (auto v : g.values) {
    if (v > 1) throw FormatError("bool payload holds a value other than 0 or 1");
  }
  return g;
}

ScoreGrid scores_from_container(const GridContainer& c, const GridGeometry& geometry) {
  expect_kind(c, PayloadKind::Scores);
  expect_dims(c, geometry);
  if (c.channels != 1) throw FormatError("score container must hold one channel");
  ScoreGrid g{geometry, real_payload(c)};
  g.validate();
  return g;
}

FeatureGrid features_from_container(const GridContainer& c, const GridGeometry& geometry) {
  expect_kind(c, PayloadKind::Features);
  expect_dims(c, geometry);
  FeatureGrid g{geometry, static_cast<int>(c.channels), real_payload(c)};
  g.validate();
  return g;
}

AnisotropyMap anisotropy_from_container(const GridContainer& c, const GridGeometry& geometry) {
  expect_kind(c, PayloadKind::Anisotropy);
  expect_dims(c, geometry);
  if (c.channels != 4) throw FormatError("anisotropy container must hold four channels");
  const std::vector<double> v = real_payload(c);
  const std::size_t n = geometry.dims.count();
  AnisotropyMap m{geometry, std::vector<std::uint8_t>(n), std::vector<std::uint8_t>(n),
                  std::vector<std::uint8_t>(n), std::vector<double>(n)};
  auto count = [](double x, int limit) {
    if (!(x >= 0.0 && x <= limit) || x != std::floor(x)) {
      throw FormatError("anisotropy count out of range");
    }
    return static_cast<std::uint8_t>(x);
  };
  for (std::size_t i = 0; i < n; ++i) {
    m.s_surface[i] = count(v[i * 4 + 0], 6);
    m.s_edge[i] = count(v[i * 4 + 1], 12);
    m.s_vertex[i] = count(v[i * 4 + 2], 8);
    m.s_csa[i] = v[i * 4 + 3];
  }
  return m;
}

FeatureMap2D feature_map_from_container(const GridContainer& c, double downscale) {
  expect_kind(c, PayloadKind::Features);
  if (c.dims.z != 1) throw FormatError("2D feature map container must have dims (H, W, 1)");
  FeatureMap2D m{c.dims.y, c.dims.x, static_cast<int>(c.channels), downscale, real_payload(c)};
  m.validate();
  return m;
}

DepthMap depth_map_from_container(const GridContainer& c) {
  expect_kind(c, PayloadKind::Features);
  if (c.dims.z != 1 || c.channels != 1) {
    throw FormatError("depth container must have dims (H, W, 1) and one channel");
  }
  DepthMap m{c.dims.y, c.dims.x, real_payload(c)};
  m.validate();
  return m;
}

Matrix matrix_from_container(const GridContainer& c) {
  expect_kind(c, PayloadKind::Features);
  if (c.dims.y != 1 || c.dims.z != 1) throw FormatError("matrix container must have dims (R, 1, 1)");
  return Matrix{static_cast<std::size_t>(c.dims.x), c.channels, real_payload(c)};
}

// ---------------------------------------------------------------------------

std::string critical_set_json(const CriticalSetFile& set) {
  nlohmann::ordered_json doc;
  doc["high_resolution"] = {set.high_resolution.x, set.high_resolution.y, set.high_resolution.z};
  doc["low_resolution"] = {set.low_resolution.x, set.low_resolution.y, set.low_resolution.z};
  doc["lambda"] = set.lambda;
  doc["k"] = set.high_indices.size();
  doc["high_indices"] = set.high_indices;
  doc["low_indices"] = set.low_indices;
  doc["ranking_score"] = set.ranking_score;
  return doc.dump() + "\n";
}

CriticalSetFile parse_critical_set_json(std::string_view text) {
  CriticalSetFile set;
  try {
    const auto doc = nlohmann::json::parse(text);
    auto dims = [&](const char* key) {
      const auto v = doc.at(key).get<std::vector<std::int32_t>>();
      if (v.size() != 3) throw ParseError(std::string(key) + " must have three entries");
      return GridDims{v[0], v[1], v[2]};
    };
    set.high_resolution = dims("high_resolution");
    set.low_resolution = dims("low_resolution");
    set.lambda = doc.at("lambda").get<std::int32_t>();
    set.high_indices = doc.at("high_indices").get<std::vector<std::size_t>>();
    set.low_indices = doc.at("low_indices").get<std::vector<std::size_t>>();
    set.ranking_score = doc.at("ranking_score").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("critical set: ") + e.what());
  }
  if (set.high_indices.size() != set.low_indices.size() ||
      set.ranking_score.size() != set.high_indices.size()) {
    throw FormatError("critical set index lists differ in length");
  }
  const ResolutionPair pair{set.high_resolution, set.low_resolution, set.lambda};
  pair.validate();
  for (std::size_t i : set.high_indices) {
    if (i >= set.high_resolution.count()) throw FormatError("critical index outside grid");
  }
  for (std::size_t i : set.low_indices) {
    if (i >= set.low_resolution.count()) throw FormatError("paired index outside grid");
  }
  return set;
}

}  // namespace voxalign
