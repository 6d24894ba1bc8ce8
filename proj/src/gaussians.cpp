#include "roves/gaussians.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kdtree.hpp"
#include "roves/error.hpp"

namespace roves::gaussians {

static_assert(std::endian::native == std::endian::little,
              "PLY I/O assumes a little-endian host");

void GaussianCloud::validate() const {
  const std::size_t n = positions.size();
  if (sh_dc.size() != n || sh_rest.size() != n || opacities.size() != n ||
      log_scales.size() != n || rotations.size() != n) {
    throw InputError("gaussian cloud attribute arrays have inconsistent lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (float s : log_scales[i]) {
      if (!std::isfinite(s)) throw InputError(fmt::format("primitive {} has a non-finite log scale", i));
    }
    const auto& q = rotations[i];
    const double norm = std::sqrt(double(q[0]) * q[0] + double(q[1]) * q[1] +
                                  double(q[2]) * q[2] + double(q[3]) * q[3]);
    if (std::abs(norm - 1.0) > 1e-6) {
      throw InputError(fmt::format("primitive {} rotation is not unit norm ({})", i, norm));
    }
  }
}

void GaussianCloud::append_from(const GaussianCloud& other, std::size_t i) {
  positions.push_back(other.positions[i]);
  sh_dc.push_back(other.sh_dc[i]);
  sh_rest.push_back(other.sh_rest[i]);
  opacities.push_back(other.opacities[i]);
  log_scales.push_back(other.log_scales[i]);
  rotations.push_back(other.rotations[i]);
}

void GaussianCloud::reserve(std::size_t n) {
  positions.reserve(n);
  sh_dc.reserve(n);
  sh_rest.reserve(n);
  opacities.reserve(n);
  log_scales.reserve(n);
  rotations.reserve(n);
}

Eigen::Vector3d GaussianCloud::base_color(std::size_t i) const {
  return {dc_to_rgb(sh_dc[i][0]), dc_to_rgb(sh_dc[i][1]), dc_to_rgb(sh_dc[i][2])};
}

double rgb_to_dc(double channel) { return (channel - 0.5) / kShC0; }
double dc_to_rgb(double dc) { return dc * kShC0 + 0.5; }
double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void ScaleConfig::validate() const {
  if (!(sigma > 0.0 && sigma <= 1.0)) {
    throw InputError(fmt::format("scale factor sigma must lie in (0, 1] (got {})", sigma));
  }
  if (!(epsilon > 0.0)) throw InputError(fmt::format("epsilon must be > 0 (got {})", epsilon));
  if (k < 1) throw InputError("neighbor count k must be >= 1");
}

// ---------------------------------------------------------------------------
// Nearest-neighbor distances and scales

std::vector<double> nn_distance(std::span<const Eigen::Vector3d> points, std::uint32_t k,
                                std::size_t brute_force_limit) {
  if (points.size() < 2) throw InputError("nearest-neighbor distance needs at least 2 points");
  if (k < 1) throw InputError("neighbor count k must be >= 1");
  const std::size_t kk = std::min<std::size_t>(k, points.size() - 1);

  auto statistic = [kk](const std::vector<double>& sq) {
    if (kk == 1) return std::sqrt(sq.front());
    double acc = 0.0;
    for (std::size_t j = 0; j < kk; ++j) acc += sq[j];
    return std::sqrt(acc / static_cast<double>(kk));
  };

  std::vector<double> out(points.size());
  if (points.size() <= brute_force_limit) {
    std::vector<double> sq;
    sq.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      sq.clear();
      for (std::size_t j = 0; j < points.size(); ++j) {
        if (j != i) sq.push_back(detail::squared_distance(points[i], points[j]));
      }
      std::partial_sort(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(kk), sq.end());
      out[i] = statistic(sq);
    }
    return out;
  }

  const detail::KdTree3 tree(points);
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = statistic(tree.nearest(i, kk));
  return out;
}

std::vector<std::array<double, 3>> init_scales(std::span<const double> distances,
                                               const ScaleConfig& config) {
  config.validate();
  const double log_sigma = std::log(config.sigma);
  std::vector<std::array<double, 3>> out;
  out.reserve(distances.size());
  for (double d : distances) {
    if (!(d >= 0.0)) throw InputError(fmt::format("neighbor distance must be >= 0 (got {})", d));
    const double s = std::log(std::sqrt(d * d + config.epsilon)) + log_sigma;
    out.push_back({s, s, s});
  }
  return out;
}

GaussianCloud make_primitives(const PointCloud& world_cloud, const ScaleConfig& config,
                              double opacity) {
  if (world_cloud.points.empty()) throw InputError("cannot make primitives from an empty cloud");
  if (world_cloud.colors.size() != world_cloud.points.size()) {
    throw InputError("point cloud colors and positions differ in count");
  }
  if (!(opacity > 0.0 && opacity < 1.0)) {
    throw InputError(fmt::format("opacity must lie in (0, 1) (got {})", opacity));
  }
  config.validate();

  const auto distances = nn_distance(world_cloud.points, config.k);
  const auto scales = init_scales(distances, config);
  const auto stored_opacity = static_cast<float>(logit(opacity));

  GaussianCloud cloud;
  cloud.reserve(world_cloud.size());
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < world_cloud.size(); ++i) {
    const auto& p = world_cloud.points[i];
    Eigen::Vector3d rgb = world_cloud.colors[i];
    if ((rgb.array() < 0.0).any() || (rgb.array() > 1.0).any()) {
      ++clamped;
      rgb = rgb.cwiseMax(0.0).cwiseMin(1.0);
    }
    cloud.positions.push_back(
        {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z())});
    cloud.sh_dc.push_back({static_cast<float>(rgb_to_dc(rgb.x())),
                           static_cast<float>(rgb_to_dc(rgb.y())),
                           static_cast<float>(rgb_to_dc(rgb.z()))});
    cloud.sh_rest.push_back({});
    cloud.opacities.push_back(stored_opacity);
    cloud.log_scales.push_back({static_cast<float>(scales[i][0]),
                                static_cast<float>(scales[i][1]),
                                static_cast<float>(scales[i][2])});
    cloud.rotations.push_back({1.0f, 0.0f, 0.0f, 0.0f});
  }
  if (clamped > 0) spdlog::warn("clamped {} point colors into [0, 1]", clamped);
  return cloud;
}

// ---------------------------------------------------------------------------
// Merge

std::vector<std::size_t> footprint_members(const GaussianCloud& cloud,
                                           const GaussianCloud& inserted,
                                           const MergeOptions& options) {
  std::vector<std::size_t> members;
  if (inserted.empty()) return members;
  options.plane.validate();
  auto world = [](const std::array<float, 3>& p) { return Eigen::Vector3d(p[0], p[1], p[2]); };

  Eigen::Vector2d lo = options.plane.to_plane(world(inserted.positions.front()));
  Eigen::Vector2d hi = lo;
  for (const auto& p : inserted.positions) {
    const auto q = options.plane.to_plane(world(p));
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  lo.array() -= options.margin;
  hi.array() += options.margin;

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto w = world(cloud.positions[i]);
    const auto q = options.plane.to_plane(w);
    if (q.x() < lo.x() || q.x() > hi.x() || q.y() < lo.y() || q.y() > hi.y()) continue;
    if (options.height_band) {
      const double h = options.plane.height_of(w);
      if (h < options.height_band->first || h > options.height_band->second) continue;
    }
    members.push_back(i);
  }
  return members;
}

MergeResult merge(const GaussianCloud& background, const GaussianCloud& inserted,
                  const MergeOptions& options) {
  background.validate();
  inserted.validate();
  const auto doomed = footprint_members(background, inserted, options);

  MergeResult result;
  result.removed = doomed.size();
  result.cloud.reserve(background.size() - doomed.size() + inserted.size());
  auto next = doomed.begin();
  for (std::size_t i = 0; i < background.size(); ++i) {
    if (next != doomed.end() && *next == i) {
      ++next;
      continue;
    }
    result.cloud.append_from(background, i);
  }
  for (std::size_t i = 0; i < inserted.size(); ++i) result.cloud.append_from(inserted, i);
  return result;
}

// ---------------------------------------------------------------------------
// PLY

namespace {

std::vector<std::string> property_order() {
  std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz",
                                    "f_dc_0", "f_dc_1", "f_dc_2"};
  for (std::size_t i = 0; i < kShRestCount; ++i) names.push_back(fmt::format("f_rest_{}", i));
  names.insert(names.end(), {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1",
                             "rot_2", "rot_3"});
  return names;
}

std::size_t type_size(const std::string& type) {
  static const std::map<std::string, std::size_t> sizes = {
      {"char", 1},   {"uchar", 1},  {"int8", 1},    {"uint8", 1},   {"short", 2},
      {"ushort", 2}, {"int16", 2},  {"uint16", 2},  {"int", 4},     {"uint", 4},
      {"int32", 4},  {"uint32", 4}, {"float", 4},   {"float32", 4}, {"double", 8},
      {"float64", 8}};
  const auto it = sizes.find(type);
  return it == sizes.end() ? 0 : it->second;
}

struct Property {
  std::string name;
  std::string type;
  std::size_t offset;  // within a vertex record
};

}  // namespace

std::vector<std::uint8_t> encode_ply(const GaussianCloud& cloud) {
  cloud.validate();
  std::string header = fmt::format("ply\nformat binary_little_endian 1.0\nelement vertex {}\n",
                                   cloud.size());
  for (const auto& name : property_order()) header += fmt::format("property float {}\n", name);
  header += "end_header\n";

  constexpr std::size_t kFloats = 3 + 3 + 3 + kShRestCount + 1 + 3 + 4;
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  const std::size_t payload = bytes.size();
  bytes.resize(payload + cloud.size() * kFloats * sizeof(float));
  std::array<float, kFloats> record{};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto it = record.begin();
    it = std::copy(cloud.positions[i].begin(), cloud.positions[i].end(), it);
    it = std::fill_n(it, 3, 0.0f);  // normals
    it = std::copy(cloud.sh_dc[i].begin(), cloud.sh_dc[i].end(), it);
    it = std::copy(cloud.sh_rest[i].begin(), cloud.sh_rest[i].end(), it);
    *it++ = cloud.opacities[i];
    it = std::copy(cloud.log_scales[i].begin(), cloud.log_scales[i].end(), it);
    std::copy(cloud.rotations[i].begin(), cloud.rotations[i].end(), it);
    std::memcpy(bytes.data() + payload + i * sizeof(record), record.data(), sizeof(record));
  }
  return bytes;
}

void save_ply(const GaussianCloud& cloud, const std::filesystem::path& path) {
  const auto bytes = encode_ply(cloud);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError(fmt::format("failed writing {}", path.string()));
}

GaussianCloud decode_ply(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::pair<std::size_t, std::string> {
    const std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    if (pos >= bytes.size()) throw PlyError(start, "PLY header is not terminated by end_header");
    std::string line(reinterpret_cast<const char*>(bytes.data()) + start, pos - start);
    ++pos;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return {start, line};
  };

  if (next_line().second != "ply") throw PlyError(0, "missing 'ply' magic line");
  bool format_ok = false;
  bool in_vertex = false;
  bool seen_vertex = false;
  std::size_t count = 0;
  std::size_t stride = 0;
  std::vector<Property> props;
  while (true) {
    const auto [offset, line] = next_line();
    std::istringstream words(line);
    std::string keyword;
    words >> keyword;
    if (keyword == "end_header") break;
    if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) continue;
    if (keyword == "format") {
      std::string kind, version;
      words >> kind >> version;
      if (kind != "binary_little_endian") {
        throw PlyError(offset, fmt::format("unsupported PLY format '{}' (need binary_little_endian)", kind));
      }
      format_ok = true;
    } else if (keyword == "element") {
      std::string name;
      long long n = -1;
      words >> name >> n;
      if (seen_vertex || name != "vertex") {
        throw PlyError(offset, fmt::format("unsupported PLY element '{}'", name));
      }
      if (n < 0) throw PlyError(offset, "bad vertex count");
      count = static_cast<std::size_t>(n);
      in_vertex = seen_vertex = true;
    } else if (keyword == "property") {
      if (!in_vertex) throw PlyError(offset, "property outside of an element");
      std::string type, name;
      words >> type >> name;
      if (type == "list") throw PlyError(offset, "list properties are not supported");
      const std::size_t size = type_size(type);
      if (size == 0) throw PlyError(offset, fmt::format("unknown property type '{}'", type));
      props.push_back({name, type, stride});
      stride += size;
    } else {
      throw PlyError(offset, fmt::format("unexpected header line '{}'", line));
    }
  }
  if (!format_ok) throw PlyError(0, "PLY header lacks a format line");
  if (!seen_vertex) throw PlyError(0, "PLY header lacks a vertex element");

  const std::size_t header_end = pos;
  auto find = [&](const std::string& name, bool required) -> const Property* {
    for (const auto& p : props) {
      if (p.name != name) continue;
      if (p.type != "float" && p.type != "float32") {
        throw PlyError(header_end, fmt::format("property '{}' must be float, got {}", name, p.type));
      }
      return &p;
    }
    if (required) throw PlyError(header_end, fmt::format("PLY is missing required property '{}'", name));
    return nullptr;
  };

  std::array<const Property*, 3> pos_p{}, dc_p{}, scale_p{};
  std::array<const Property*, 4> rot_p{};
  std::array<const Property*, kShRestCount> rest_p{};
  for (int c = 0; c < 3; ++c) {
    pos_p[c] = find(std::string(1, "xyz"[c]), true);
    dc_p[c] = find(fmt::format("f_dc_{}", c), true);
    scale_p[c] = find(fmt::format("scale_{}", c), true);
  }
  for (int c = 0; c < 4; ++c) rot_p[c] = find(fmt::format("rot_{}", c), true);
  for (std::size_t c = 0; c < kShRestCount; ++c) rest_p[c] = find(fmt::format("f_rest_{}", c), false);
  const Property* opacity_p = find("opacity", true);

  const std::size_t needed = count * stride;
  if (bytes.size() - header_end < needed) {
    const std::size_t complete = (bytes.size() - header_end) / std::max<std::size_t>(stride, 1);
    throw PlyError(header_end + complete * stride,
                   fmt::format("truncated PLY payload: {} vertices declared, {} bytes needed after "
                               "offset {}, only {} present",
                               count, needed, header_end, bytes.size() - header_end));
  }

  GaussianCloud cloud;
  cloud.reserve(count);
  std::size_t renormalized = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* record = bytes.data() + header_end + i * stride;
    auto read = [record](const Property* p) {
      float v = 0.0f;
      if (p) std::memcpy(&v, record + p->offset, sizeof(float));
      return v;
    };
    cloud.positions.push_back({read(pos_p[0]), read(pos_p[1]), read(pos_p[2])});
    cloud.sh_dc.push_back({read(dc_p[0]), read(dc_p[1]), read(dc_p[2])});
    std::array<float, kShRestCount> rest{};
    for (std::size_t c = 0; c < kShRestCount; ++c) rest[c] = read(rest_p[c]);
    cloud.sh_rest.push_back(rest);
    cloud.opacities.push_back(read(opacity_p));
    cloud.log_scales.push_back({read(scale_p[0]), read(scale_p[1]), read(scale_p[2])});

    std::array<float, 4> q{read(rot_p[0]), read(rot_p[1]), read(rot_p[2]), read(rot_p[3])};
    const double norm = std::sqrt(double(q[0]) * q[0] + double(q[1]) * q[1] +
                                  double(q[2]) * q[2] + double(q[3]) * q[3]);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw PlyError(header_end + i * stride,
                     fmt::format("vertex {} has a zero or non-finite rotation quaternion", i));
    }
    if (std::abs(norm - 1.0) > 1e-6) {
      for (auto& c : q) c = static_cast<float>(c / norm);
      ++renormalized;
    }
    cloud.rotations.push_back(q);
    for (float s : cloud.log_scales.back()) {
      if (!std::isfinite(s)) {
        throw PlyError(header_end + i * stride, fmt::format("vertex {} has a non-finite scale", i));
      }
    }
  }
  if (renormalized > 0) spdlog::debug("normalized {} rotation quaternions on load", renormalized);
  return cloud;
}

GaussianCloud load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return decode_ply(bytes);
  } catch (const PlyError& e) {
    throw PlyError(e.offset(), fmt::format("{}: {} (byte offset {})", path.string(), e.what(),
                                           e.offset()));
  }
}

}  // namespace roves::gaussians
