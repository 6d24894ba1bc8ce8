#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "roves/geometry.hpp"
#include "roves/halfcar.hpp"

namespace roves::heightfield {

/// Least-squares plane through `points` after one trimming pass that drops
/// points whose residual lies outside the [2%, 98%] residual quantiles. The
/// normal is oriented so that normal . up >= 0.
GroundPlane fit_ground_plane(std::span<const Eigen::Vector3d> points,
                             const Eigen::Vector3d& up = Eigen::Vector3d::UnitZ());

/// max keeps protrusions (speed humps), min keeps depressions (sunken road).
enum class Accumulation : std::uint8_t { kMax = 0, kMin = 1 };

/// Regular grid of signed residuals over plane coordinates. Cell (i, j) covers
/// [origin + (i, j) * cell_size, origin + (i + 1, j + 1) * cell_size); i runs
/// along plane u, j along plane v, storage is row-major over j.
class HeightField {
 public:
  HeightField(Eigen::Vector2d origin, double cell_size, std::uint32_t width,
              std::uint32_t height, Accumulation mode);

  const Eigen::Vector2d& origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  Accumulation mode() const { return mode_; }

  float residual(std::uint32_t i, std::uint32_t j) const { return residuals_[index(i, j)]; }
  bool occupied(std::uint32_t i, std::uint32_t j) const { return counts_[index(i, j)] > 0; }
  /// Number of points that landed in the cell (1 for occupied cells of a
  /// field read from disk).
  std::uint32_t count(std::uint32_t i, std::uint32_t j) const { return counts_[index(i, j)]; }

  Eigen::Vector2d cell_center(std::uint32_t i, std::uint32_t j) const;

  /// Folds one residual into the cell containing `position`. Returns false if
  /// the position is off the grid.
  bool accumulate(const Eigen::Vector2d& position, double residual);

  /// Marks a cell as occupied with the given value, replacing its content.
  void set_cell(std::uint32_t i, std::uint32_t j, float residual, std::uint32_t count = 1);

  std::uint64_t total_count() const;
  /// Extremes over occupied cells; {0, 0} for an empty field.
  std::pair<float, float> occupied_range() const;

 private:
  std::size_t index(std::uint32_t i, std::uint32_t j) const {
    return static_cast<std::size_t>(j) * width_ + i;
  }

  Eigen::Vector2d origin_;
  double cell_size_;
  std::uint32_t width_;
  std::uint32_t height_;
  Accumulation mode_;
  std::vector<float> residuals_;
  std::vector<std::uint32_t> counts_;
};

/// Projects points onto the plane grid; footprint plus one cell of margin.
HeightField build_heightfield(std::span<const Eigen::Vector3d> points,
                              const GroundPlane& plane, double cell_size,
                              Accumulation mode);

/// Bilinear interpolation between cell centers with zero for unoccupied and
/// off-grid cells; 0 outside the grid rectangle.
double sample_height(const HeightField& field, const Eigen::Vector2d& position);

struct TrajectorySample {
  double t = 0.0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  // CoM, plane coords
  Eigen::Vector2d heading = Eigen::Vector2d::UnitX();  // unit
};

/// Timestamped CoM track in plane coordinates.
struct Trajectory {
  std::vector<TrajectorySample> samples;

  /// Throws InputError on empty input, non-increasing timestamps or
  /// non-unit headings.
  void validate() const;

  /// Straight line at constant speed, sampled at `rate` Hz on [t0, t1].
  static Trajectory straight(const Eigen::Vector2d& start, const Eigen::Vector2d& heading,
                             double speed, double t0, double t1, double rate);

  /// Position/heading at time t, linear between samples and clamped at the ends.
  TrajectorySample at(double t) const;
};

/// Road heights under both axles along the trajectory on a dt grid. The
/// returned excitation is indexed by time relative to the first trajectory
/// sample.
halfcar::RoadExcitation excitation_along(const HeightField& field,
                                         const Trajectory& trajectory,
                                         const halfcar::VehicleParams& params, double dt);

/// Binary grid file: 16-byte header ("RVHF", u32 version, u8 mode, 7 zero
/// bytes), f64 origin u, origin v, cell size, u32 width, height, f32 residuals
/// row-major, occupancy bitmap (LSB first). All little-endian.
void save_grid(const HeightField& field, const std::filesystem::path& path);
HeightField load_grid(const std::filesystem::path& path);

/// 16-bit binary PGM; occupied-cell residual range mapped linearly to
/// [0, 65535], empty cells written as the level of residual 0 clamped to range.
void save_pgm(const HeightField& field, const std::filesystem::path& path);

}  // namespace roves::heightfield
