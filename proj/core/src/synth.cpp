// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxalign/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "voxalign/error.hpp"
#include "voxalign/parallel.hpp"

namespace voxalign {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("SplitMix64::below needs a positive bound");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return v % bound;
}

CameraRig CameraPlacement::rig() const {
  if (eye) return CameraRig::look_at(fx, fy, cx, cy, size, *eye, target, up);
  return CameraRig::from_intrinsics(fx, fy, cx, cy, R, t, size);
}

void SceneSpec::validate() const {
  geometry.validate();
  table.validate();
  const GridDims d = geometry.dims;
  auto check_label = [&](Label l) {
    if (l >= table.count()) {
      throw SpecError("primitive label " + std::to_string(l) + " is not in the class table");
    }
  };
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const Primitive& p = primitives[i];
    check_label(p.label);
    const std::string where = "primitive " + std::to_string(i);
    if (p.kind == Primitive::Kind::Box) {
      const bool ok = p.min.x >= 0 && p.min.y >= 0 && p.min.z >= 0 && p.max.x <= d.x &&
                      p.max.y <= d.y && p.max.z <= d.z && p.min.x < p.max.x &&
                      p.min.y < p.max.y && p.min.z < p.max.z;
      if (!ok) throw SpecError(where + " is empty or leaves the grid " + d.to_string());
    } else if (p.z < 0 || p.thickness < 1 || p.z + p.thickness > d.z) {
      throw SpecError(where + " ground slab leaves the grid " + d.to_string());
    }
  }
  if (random_boxes) {
    const RandomBoxes& r = *random_boxes;
    if (r.count < 0 || r.align < 1 || r.min_extent < 1 || r.max_extent < r.min_extent) {
      throw SpecError("random_boxes needs count >= 0, align >= 1, 1 <= min_extent <= max_extent");
    }
    if (r.count > 0 && r.labels.empty()) throw SpecError("random_boxes needs labels");
    for (Label l : r.labels) check_label(l);
    if (r.max_extent * r.align > std::min({d.x, d.y, d.z})) {
      throw SpecError("random box extent exceeds the grid");
    }
  }
  for (const CameraPlacement& c : cameras) (void)c.rig();
}

namespace {

using nlohmann::json;

Vec3 vec3_of(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw SpecError("expected a 3-vector");
  return {v[0], v[1], v[2]};
}

Coord coord_of_json(const json& j) {
  const auto v = j.get<std::vector<std::int32_t>>();
  if (v.size() != 3) throw SpecError("expected three integers");
  return {v[0], v[1], v[2]};
}

Mat3 mat3_of(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.size() != 3) throw SpecError("expected a 3x3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    if (rows[r].size() != 3) throw SpecError("expected a 3x3 matrix");
    for (int c = 0; c < 3; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Label label_of(const json& j, const ClassTable& table) {
  if (j.is_string()) {
    const auto found = table.find(j.get<std::string>());
    if (!found) throw SpecError("unknown class name '" + j.get<std::string>() + "'");
    return *found;
  }
  return j.get<Label>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      throw SpecError("unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

SceneSpec SceneSpec::from_json(std::string_view text) {
  SceneSpec spec;
  try {
    const json doc = json::parse(text);
    reject_unknown(doc,
                   {"dims", "origin", "voxel_size", "classes", "seed", "primitives",
                    "random_boxes", "cameras"},
                   "scene spec");
    const Coord dims = coord_of_json(doc.at("dims"));
    spec.geometry.dims = {dims.x, dims.y, dims.z};
    if (doc.contains("origin")) spec.geometry.origin = vec3_of(doc["origin"]);
    spec.geometry.voxel_size = doc.value("voxel_size", 1.0);
    spec.seed = doc.value("seed", std::uint64_t{0});

    const json classes = doc.value("classes", json("semantic_kitti"));
    if (classes.is_string()) {
      const auto name = classes.get<std::string>();
      if (name == "semantic_kitti") {
        spec.table = ClassTable::semantic_kitti();
      } else if (name == "kitti360") {
        spec.table = ClassTable::kitti360();
      } else {
        throw SpecError("unknown class table '" + name + "'");
      }
    } else {
      spec.table.names = classes.get<std::vector<std::string>>();
    }
    spec.table.validate();

    for (const json& p : doc.value("primitives", json::array())) {
      Primitive prim;
      const auto type = p.at("type").get<std::string>();
      if (type == "box") {
        reject_unknown(p, {"type", "min", "max", "class"}, "box primitive");
        prim.kind = Primitive::Kind::Box;
        prim.min = coord_of_json(p.at("min"));
        prim.max = coord_of_json(p.at("max"));
      } else if (type == "ground") {
        reject_unknown(p, {"type", "z", "thickness", "class"}, "ground primitive");
        prim.kind = Primitive::Kind::Ground;
        prim.z = p.value("z", 0);
        prim.thickness = p.value("thickness", 1);
      } else {
        throw SpecError("unknown primitive type '" + type + "'");
      }
      prim.label = label_of(p.at("class"), spec.table);
      spec.primitives.push_back(prim);
    }

    if (doc.contains("random_boxes")) {
      const json& r = doc["random_boxes"];
      reject_unknown(r, {"count", "min_extent", "max_extent", "align", "classes"},
                     "random_boxes");
      RandomBoxes rb;
      rb.count = r.value("count", 0);
      rb.min_extent = r.value("min_extent", 1);
      rb.max_extent = r.value("max_extent", 4);
      rb.align = r.value("align", 1);
      for (const json& c : r.at("classes")) rb.labels.push_back(label_of(c, spec.table));
      spec.random_boxes = rb;
    }

    for (const json& c : doc.value("cameras", json::array())) {
      reject_unknown(c, {"fx", "fy", "cx", "cy", "width", "height", "eye", "target", "up", "R", "t"},
                     "camera");
      CameraPlacement cam;
      cam.fx = c.at("fx").get<double>();
      cam.fy = c.at("fy").get<double>();
      cam.cx = c.at("cx").get<double>();
      cam.cy = c.at("cy").get<double>();
      cam.size = {c.at("width").get<int>(), c.at("height").get<int>()};
      if (c.contains("eye")) {
        cam.eye = vec3_of(c["eye"]);
        cam.target = vec3_of(c.at("target"));
        if (c.contains("up")) cam.up = vec3_of(c["up"]);
      } else {
        cam.R = mat3_of(c.at("R"));
        cam.t = vec3_of(c.at("t"));
      }
      spec.cameras.push_back(cam);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

namespace {

void paint_box(LabelGrid& g, Coord lo, Coord hi, Label label) {
  const GridDims d = g.dims();
  for (std::int32_t x = lo.x; x < hi.x; ++x)
    for (std::int32_t y = lo.y; y < hi.y; ++y)
      for (std::int32_t z = lo.z; z < hi.z; ++z) g.labels[linear_index({x, y, z}, d)] = label;
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  const GridDims d = spec.geometry.dims;
  Scene scene{LabelGrid::filled(spec.geometry, ClassTable::kEmpty), {}, {}};
  for (const Primitive& p : spec.primitives) {
    if (p.kind == Primitive::Kind::Box) {
      paint_box(scene.labels, p.min, p.max, p.label);
    } else {
      paint_box(scene.labels, {0, 0, p.z}, {d.x, d.y, p.z + p.thickness}, p.label);
    }
  }
  if (spec.random_boxes && spec.random_boxes->count > 0) {
    const RandomBoxes& r = *spec.random_boxes;
    SplitMix64 rng(spec.seed);
    const std::int32_t span = r.max_extent - r.min_extent + 1;
    for (std::int32_t b = 0; b < r.count; ++b) {
      Coord lo, hi;
      std::int32_t* lo_axes[3] = {&lo.x, &lo.y, &lo.z};
      std::int32_t* hi_axes[3] = {&hi.x, &hi.y, &hi.z};
      const std::int32_t extents[3] = {d.x, d.y, d.z};
      for (int a = 0; a < 3; ++a) {
        const std::int32_t ext =
            (r.min_extent + static_cast<std::int32_t>(rng.below(span))) * r.align;
        const std::int32_t slots = (extents[a] - ext) / r.align + 1;
        *lo_axes[a] = static_cast<std::int32_t>(rng.below(slots)) * r.align;
        *hi_axes[a] = *lo_axes[a] + ext;
      }
      const Label label = r.labels[rng.below(r.labels.size())];
      paint_box(scene.labels, lo, hi, label);
    }
  }
  for (const CameraPlacement& c : spec.cameras) {
    scene.rigs.push_back(c.rig());
    scene.depths.push_back(render_depth(scene.labels, scene.rigs.back()));
  }
  return scene;
}

DepthMap render_depth(const LabelGrid& labels, const CameraRig& rig) {
  labels.validate();
  const GridDims d = labels.dims();
  const GridGeometry& g = labels.geometry;
  const ImageSize size = rig.image_size();
  DepthMap dm = DepthMap::filled(size.width, size.height, 0.0);
  const Vec3 center = rig.center();
  // Ray origin in voxel units.
  const Vec3 o = (center - g.origin) / g.voxel_size;
  const double extent[3] = {static_cast<double>(d.x), static_cast<double>(d.y),
                            static_cast<double>(d.z)};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kMinChord = 1e-9;

  parallel_for(0, static_cast<std::size_t>(size.height), [&](std::size_t r0, std::size_t r1) {
    for (std::size_t row = r0; row < r1; ++row) {
      for (int col = 0; col < size.width; ++col) {
        Vec3 dc = rig.K_inverse() * Vec3(col + 0.5, static_cast<double>(row) + 0.5, 1.0);
        dc /= dc.z();
        // Ray parameter t equals camera-frame depth.
        const Vec3 dir = rig.R_inverse() * dc / g.voxel_size;

        double t_enter = 0.0;
        double t_exit = kInf;
        for (int a = 0; a < 3; ++a) {
          if (dir[a] == 0.0) {
            if (o[a] < 0.0 || o[a] > extent[a]) t_exit = -kInf;
            continue;
          }
          double ta = (0.0 - o[a]) / dir[a];
          double tb = (extent[a] - o[a]) / dir[a];
          if (ta > tb) std::swap(ta, tb);
          t_enter = std::max(t_enter, ta);
          t_exit = std::min(t_exit, tb);
        }
        if (!(t_exit > t_enter)) continue;

        const double t_mid_entry = 0.5 * (t_enter + std::min(t_exit, t_enter + 1e-6));
        std::int32_t cell[3];
        int step[3];
        double t_next[3];
        double t_delta[3];
        for (int a = 0; a < 3; ++a) {
          const double p = o[a] + t_mid_entry * dir[a];
          const auto dim = static_cast<std::int32_t>(extent[a]);
          cell[a] = std::clamp(static_cast<std::int32_t>(std::floor(p)), 0, dim - 1);
          if (dir[a] > 0.0) {
            step[a] = 1;
            t_next[a] = (cell[a] + 1 - o[a]) / dir[a];
            t_delta[a] = 1.0 / dir[a];
          } else if (dir[a] < 0.0) {
            step[a] = -1;
            t_next[a] = (cell[a] - o[a]) / dir[a];
            t_delta[a] = -1.0 / dir[a];
          } else {
            step[a] = 0;
            t_next[a] = kInf;
            t_delta[a] = kInf;
          }
        }

        double t_in = t_enter;
        while (t_in < t_exit) {
          const int axis = t_next[0] <= t_next[1]
                               ? (t_next[0] <= t_next[2] ? 0 : 2)
                               : (t_next[1] <= t_next[2] ? 1 : 2);
          const double t_out = std::min(t_next[axis], t_exit);
          const std::size_t idx = linear_index({cell[0], cell[1], cell[2]}, d);
          if (labels.labels[idx] != ClassTable::kEmpty && t_out - t_in > kMinChord) {
            dm.at(col, static_cast<int>(row)) = 0.5 * (t_in + t_out);
            break;
          }
          cell[axis] += step[axis];
          if (cell[axis] < 0 || cell[axis] >= static_cast<std::int32_t>(extent[axis])) break;
          t_in = t_out;
          t_next[axis] += t_delta[axis];
        }
      }
    }
  });
  return dm;
}

AnisotropyMap oracle_csa(const LabelGrid& v_re, const CsaParams& params) {
  const std::int32_t X = v_re.geometry.dims.x;
  const std::int32_t Y = v_re.geometry.dims.y;
  const std::int32_t Z = v_re.geometry.dims.z;
  const std::size_t n = static_cast<std::size_t>(X) * Y * Z;
  AnisotropyMap out{v_re.geometry, std::vector<std::uint8_t>(n), std::vector<std::uint8_t>(n),
                    std::vector<std::uint8_t>(n), std::vector<double>(n)};
  auto at = [&](std::int32_t x, std::int32_t y, std::int32_t z) {
    return v_re.labels[(static_cast<std::size_t>(x) * Y + y) * Z + z];
  };
  for (std::int32_t x = 0; x < X; ++x)
    for (std::int32_t y = 0; y < Y; ++y)
      for (std::int32_t z = 0; z < Z; ++z) {
        const Label self = at(x, y, z);
        int surface = 0, edge = 0, vertex = 0;
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dz = -1; dz <= 1; ++dz) {
              const int order = (dx != 0) + (dy != 0) + (dz != 0);
              if (order == 0) continue;
              const std::int32_t nx = x + dx, ny = y + dy, nz = z + dz;
              const bool inside = nx >= 0 && nx < X && ny >= 0 && ny < Y && nz >= 0 && nz < Z;
              Label other;
              if (inside) {
                other = at(nx, ny, nz);
              } else if (params.border == BorderPolicy::PadEmpty) {
                other = 0;
              } else {
                continue;
              }
              const int xor_bit = (self != other) ? 1 : 0;
              if (order == 1) surface += xor_bit;
              if (order == 2) edge += xor_bit;
              if (order == 3) vertex += xor_bit;
            }
        const std::size_t i = (static_cast<std::size_t>(x) * Y + y) * Z + z;
        out.s_surface[i] = static_cast<std::uint8_t>(surface);
        out.s_edge[i] = static_cast<std::uint8_t>(edge);
        out.s_vertex[i] = static_cast<std::uint8_t>(vertex);
        out.s_csa[i] =
            params.alpha * (surface + params.w_e * edge + params.w_v * vertex) + params.beta;
      }
  return out;
}

std::vector<std::size_t> oracle_topk(std::span<const double> values, std::size_t k) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

std::vector<double> oracle_grad(const ScalarFunction& f, std::span<const double> x, double h) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = point[i];
    point[i] = xi + h;
    const double up = f(point);
    point[i] = xi - h;
    const double down = f(point);
    point[i] = xi;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace voxalign
