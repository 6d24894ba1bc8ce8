#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "roves/colorxfer.hpp"
#include "roves/gaussians.hpp"
#include "roves/halfcar.hpp"
#include "roves/heightfield.hpp"
#include "roves/lift.hpp"

namespace roves::pipeline {

struct VehicleSpec {
  std::string preset;                          // "ego", "front" or empty
  std::optional<halfcar::VehicleParams> params;  // inline values win over preset
  Eigen::Vector3d mount_offset = Eigen::Vector3d::Zero();

  halfcar::VehicleParams resolve() const;
};

enum class ReferenceSource { kImage, kPointCloud };

/// Run configuration. Relative paths resolve against the config file's
/// directory.
struct PipelineConfig {
  std::filesystem::path base_dir = ".";
  std::filesystem::path texture = "texture.png";
  std::filesystem::path mask = "mask.png";
  std::filesystem::path depth = "depth.png";
  std::filesystem::path background = "background.ply";
  std::filesystem::path poses = "poses.json";
  std::filesystem::path reference = "road.png";
  std::optional<std::filesystem::path> reference_mask;
  std::optional<std::filesystem::path> heightfield_points;
  std::filesystem::path output_dir = "out";

  lift::TargetDims dims{0.4, 3.0, 0.07};
  RigidTransform placement{};
  lift::LiftOptions lift{};

  gaussians::ScaleConfig scale{};
  double opacity = 0.95;
  double merge_margin = 0.02;
  std::optional<std::pair<double, double>> merge_height_band;

  bool transfer_enabled = true;
  colorxfer::TransferConfig transfer{};
  colorxfer::ColorSpace transfer_space = colorxfer::ColorSpace::kLab;
  ReferenceSource reference_source = ReferenceSource::kImage;
  bool clip_source = false;

  double cell_size = 0.05;
  heightfield::Accumulation accumulation = heightfield::Accumulation::kMax;
  double plane_ring = 2.0;
  std::optional<GroundPlane> plane;

  double dt = 1e-3;
  double divergence_bound = 1e6;
  double frame_rate = 10.0;
  std::map<std::string, VehicleSpec> vehicles{{"ego", {"ego", std::nullopt, {}}},
                                              {"front", {"front", std::nullopt, {}}}};

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  std::filesystem::path out(const std::string& name) const;

  /// Throws InputError when a numeric field violates its module invariant.
  void validate() const;
};

PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const PipelineConfig& config);

/// Deterministic synthetic inputs.
struct FixtureOptions {
  std::uint64_t seed = 7;
  double amplitude = 0.07;  // hump height (m), becomes dims.height
  double length = 0.4;      // along travel (m)
  double width = 3.0;       // across the road (m)
  std::uint32_t rows = 49;
  std::uint32_t cols = 64;
  double speed = 5.0;       // m/s for both vehicles
  double duration = 6.0;    // s
};

/// Writes texture.png, mask.png, depth.png, road.png, background.ply,
/// poses.json and config.json into `dir`.
void make_fixtures(const std::filesystem::path& dir, const FixtureOptions& options);

/// SHA-256 of a byte string as lowercase hex.
std::string sha256_hex(std::string_view bytes);

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 success, 1 internal error, 2 bad input or config.
int run_cli(const std::vector<std::string>& args);

}  // namespace roves::pipeline
