#pragma once

#include <filesystem>
#include <optional>

#include "roves/geometry.hpp"
#include "roves/image.hpp"

namespace roves::lift {

/// Relative depth restricted to a foreground mask.
struct MaskedDepth {
  image::GrayImage depth;
  image::Mask mask;

  /// Throws InputError on size mismatch, empty mask or non-finite
  /// foreground depth.
  void validate() const;
};

/// Preset physical extent of the inserted element (m): length along image
/// rows, width along image columns, height.
struct TargetDims {
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;

  void validate() const;
};

struct LiftOptions {
  /// Emit every stride-th row and column.
  std::uint32_t stride = 1;
  /// Treat smaller raw values as farther (flips the depth sense).
  bool invert_depth = false;
  /// Optional quantile clamp of the foreground depth before normalization,
  /// e.g. {0.01, 0.99}. Clamped pixels are kept, not dropped.
  std::optional<std::pair<double, double>> clip_quantiles;
};

/// Local point cloud: x in [-L/2, L/2] along rows, y in [-W/2, W/2] along
/// columns, z in [0, H] from normalized depth; colors from the texture.
struct LocalPointCloud {
  PointCloud cloud;
  TargetDims dims;
};

/// x = (row/(h-1) - 0.5) L, y = (col/(w-1) - 0.5) W,
/// z = (d - d_min) / (d_max - d_min) H for each foreground pixel.
LocalPointCloud lift_depth(const MaskedDepth& depth, const TargetDims& dims,
                           const image::RgbImage& texture, const LiftOptions& options = {});

/// Rigidly places the cloud in world coordinates; colors are unchanged.
PointCloud to_world(const PointCloud& cloud, const RigidTransform& pose);

/// ASCII PLY with "x y z red green blue" vertices (uchar colors).
void write_ascii_ply(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_ascii_ply(const std::filesystem::path& path);

}  // namespace roves::lift
