#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "roves/error.hpp"
#include "roves/geometry.hpp"

namespace roves::gaussians {

/// Degree-0 real spherical-harmonic basis constant, 1 / (2 sqrt(pi)).
inline constexpr double kShC0 = 0.28209479177387814;
inline constexpr std::size_t kShRestCount = 45;

/// Structure-of-arrays 3DGS primitive set in the on-disk representation:
/// opacity pre-sigmoid, log scales, rotation quaternion (w, x, y, z).
struct GaussianCloud {
  std::vector<std::array<float, 3>> positions;
  std::vector<std::array<float, 3>> sh_dc;
  std::vector<std::array<float, kShRestCount>> sh_rest;
  std::vector<float> opacities;
  std::vector<std::array<float, 3>> log_scales;
  std::vector<std::array<float, 4>> rotations;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }

  /// Throws InputError on inconsistent array lengths, non-finite log scales or
  /// non-unit quaternions (1e-6).
  void validate() const;

  /// Copies primitive `index` of `other` to the end of this cloud.
  void append_from(const GaussianCloud& other, std::size_t index);
  void reserve(std::size_t n);

  /// Base color of primitive `index`: DC * C0 + 0.5 per channel (unclamped).
  Eigen::Vector3d base_color(std::size_t index) const;
};

double rgb_to_dc(double channel);
double dc_to_rgb(double dc);
double logit(double p);
double sigmoid(double x);

/// Global scale tightening factor sigma in (0, 1], KNN epsilon and neighbor
/// count. With k > 1 the distance statistic is the root mean square of the k
/// nearest-neighbor distances.
struct ScaleConfig {
  double sigma = 0.01;
  double epsilon = 1e-7;
  std::uint32_t k = 1;

  void validate() const;
};

/// Index-distinct nearest-neighbor distance statistic per point. Brute force
/// up to `brute_force_limit` points, kd-tree above; both paths produce the
/// same values.
std::vector<double> nn_distance(std::span<const Eigen::Vector3d> points, std::uint32_t k = 1,
                                std::size_t brute_force_limit = 4096);

/// s = log(sqrt(d^2 + eps)) + log(sigma), identical on all three axes.
std::vector<std::array<double, 3>> init_scales(std::span<const double> distances,
                                               const ScaleConfig& config);

/// New primitives at the cloud points: DC color from RGB, zero higher-order
/// SH, opacity stored as logit(opacity), identity rotation and init_scales() log scales.
GaussianCloud make_primitives(const PointCloud& world_cloud, const ScaleConfig& config,
                              double opacity = 0.95);

struct MergeOptions {
  /// Expansion of the inserted footprint rectangle (m).
  double margin = 0.02;
  /// Plane used for the ground projection.
  GroundPlane plane{};
  /// When set, only background primitives with plane height in [lo, hi] are
  /// eligible for replacement.
  std::optional<std::pair<double, double>> height_band;
};

struct MergeResult {
  GaussianCloud cloud;
  std::size_t removed = 0;
};

/// Removes background primitives whose ground projection lies inside the
/// inserted cloud's axis-aligned footprint (plus margin) and appends the
/// inserted primitives. An empty insertion leaves the background untouched.
MergeResult merge(const GaussianCloud& background, const GaussianCloud& inserted,
                  const MergeOptions& options = {});

/// Indices of `cloud` primitives inside the expanded footprint of `inserted`.
std::vector<std::size_t> footprint_members(const GaussianCloud& cloud,
                                           const GaussianCloud& inserted,
                                           const MergeOptions& options);

/// Load/save failure with the byte offset at which the problem was found.
class PlyError : public InputError {
 public:
  PlyError(std::size_t offset, const std::string& what)
      : InputError(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Binary little-endian PLY with float vertex properties x, y, z, nx, ny, nz,
/// f_dc_0..2, f_rest_0..44, opacity, scale_0..2, rot_0..3.
void save_ply(const GaussianCloud& cloud, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_ply(const GaussianCloud& cloud);

/// Accepts extra or reordered scalar properties and fewer f_rest
/// coefficients (missing ones read as zero). Quaternions further than 1e-6
/// from unit norm are normalized.
GaussianCloud load_ply(const std::filesystem::path& path);
GaussianCloud decode_ply(std::span<const std::uint8_t> bytes);

}  // namespace roves::gaussians
