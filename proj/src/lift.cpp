#include "roves/lift.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "roves/error.hpp"
#include "roves/stats.hpp"

namespace roves::lift {

void MaskedDepth::validate() const {
  if (depth.width != mask.width || depth.height != mask.height) {
    throw InputError(fmt::format("depth is {}x{} but mask is {}x{}", depth.width, depth.height,
                                 mask.width, mask.height));
  }
  if (depth.width < 2 || depth.height < 2) {
    throw InputError(fmt::format("depth map must be at least 2x2 (got {}x{})", depth.width,
                                 depth.height));
  }
  if (mask.population() == 0) throw InputError("foreground mask is empty");
  for (std::size_t p = 0; p < depth.data.size(); ++p) {
    if (mask.data[p] && !std::isfinite(depth.data[p])) {
      throw InputError(fmt::format("non-finite depth at foreground pixel {}", p));
    }
  }
}

void TargetDims::validate() const {
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0) || !std::isfinite(length) ||
      !std::isfinite(width) || !std::isfinite(height)) {
    throw InputError(fmt::format("target dimensions must be positive (got {}, {}, {})", length,
                                 width, height));
  }
}

LocalPointCloud lift_depth(const MaskedDepth& input, const TargetDims& dims,
                           const image::RgbImage& texture, const LiftOptions& options) {
  input.validate();
  dims.validate();
  if (texture.width != input.depth.width || texture.height != input.depth.height) {
    throw InputError(fmt::format("texture is {}x{} but depth is {}x{}", texture.width,
                                 texture.height, input.depth.width, input.depth.height));
  }
  if (options.stride == 0) throw InputError("lift stride must be >= 1");

  const std::uint32_t w = input.depth.width;
  const std::uint32_t h = input.depth.height;
  const double sign = options.invert_depth ? -1.0 : 1.0;

  std::vector<double> foreground;
  foreground.reserve(input.mask.population());
  for (std::size_t p = 0; p < input.depth.data.size(); ++p) {
    if (input.mask.data[p]) foreground.push_back(sign * input.depth.data[p]);
  }
  double d_min = *std::min_element(foreground.begin(), foreground.end());
  double d_max = *std::max_element(foreground.begin(), foreground.end());
  if (options.clip_quantiles) {
    std::sort(foreground.begin(), foreground.end());
    d_min = stats::quantile_sorted(foreground, options.clip_quantiles->first);
    d_max = stats::quantile_sorted(foreground, options.clip_quantiles->second);
  }
  if (!(d_max > d_min)) {
    throw InputError("foreground depth is constant; cannot normalize to the target height");
  }

  LocalPointCloud out;
  out.dims = dims;
  for (std::uint32_t row = 0; row < h; row += options.stride) {
    for (std::uint32_t col = 0; col < w; col += options.stride) {
      if (!input.mask.at(row, col)) continue;
      const double d = std::clamp(sign * input.depth.at(row, col), d_min, d_max);
      const double x = (static_cast<double>(row) / (h - 1) - 0.5) * dims.length;
      const double y = (static_cast<double>(col) / (w - 1) - 0.5) * dims.width;
      const double z = (d - d_min) / (d_max - d_min) * dims.height;
      out.cloud.points.emplace_back(x, y, z);
      out.cloud.colors.emplace_back(texture.at(row, col, 0), texture.at(row, col, 1),
                                    texture.at(row, col, 2));
    }
  }
  return out;
}

PointCloud to_world(const PointCloud& cloud, const RigidTransform& pose) {
  pose.validate();
  PointCloud out;
  out.colors = cloud.colors;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points) out.points.push_back(pose.apply(p));
  return out;
}

void write_ascii_ply(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const auto& p = cloud.points[k];
    const auto& c = cloud.colors[k];
    auto byte = [](double v) { return std::lround(std::clamp(v, 0.0, 1.0) * 255.0); };
    out << fmt::format("{:.9g} {:.9g} {:.9g} {} {} {}\n", p.x(), p.y(), p.z(), byte(c.x()),
                       byte(c.y()), byte(c.z()));
  }
}

PointCloud read_ascii_ply(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::string line;
  std::size_t count = 0;
  bool ascii = false;
  while (std::getline(in, line)) {
    if (line.rfind("format ascii", 0) == 0) ascii = true;
    if (line.rfind("element vertex", 0) == 0) count = std::stoul(line.substr(15));
    if (line == "end_header") break;
  }
  if (!ascii) throw InputError(fmt::format("{}: not an ASCII PLY", path.string()));
  PointCloud cloud;
  for (std::size_t k = 0; k < count; ++k) {
    double x, y, z;
    int r, g, b;
    if (!(in >> x >> y >> z >> r >> g >> b)) {
      throw InputError(fmt::format("{}: truncated at vertex {}", path.string(), k));
    }
    cloud.points.emplace_back(x, y, z);
    cloud.colors.emplace_back(r / 255.0, g / 255.0, b / 255.0);
  }
  return cloud;
}

}  // namespace roves::lift
