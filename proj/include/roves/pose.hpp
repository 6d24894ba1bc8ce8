#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include "json.hpp"

#include "roves/geometry.hpp"
#include "roves/halfcar.hpp"
#include "roves/heightfield.hpp"

namespace roves::pose {

/// Object-to-world rigid pose at one frame. The object origin is the
/// vehicle's center of mass, body x points forward and body y to the left.
struct PoseFrame {
  double t = 0.0;
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

struct PoseSequence {
  std::string vehicle_id;
  std::vector<PoseFrame> frames;

  /// Throws InputError on non-increasing timestamps or non-unit quaternions.
  void validate() const;
  std::vector<double> timestamps() const;
};

struct Translate {
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
};
/// Left-multiplied into every frame rotation.
struct Rotate {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
};
/// Removes frames [begin, end).
struct DeleteFrames {
  std::size_t begin = 0;
  std::size_t end = 0;
};
using PoseEdit = std::variant<Translate, Rotate, DeleteFrames>;

PoseSequence edit_pose(const PoseSequence& seq, const PoseEdit& edit);

/// Per-frame heave (m) and pitch (rad) offsets.
struct CorrectionSeries {
  std::vector<double> heave;
  std::vector<double> pitch;

  std::size_t size() const { return heave.size(); }
};

/// Linear interpolation of z_s and theta at the given times (same clock as
/// the simulation). Throws InputError naming the first out-of-range frame.
CorrectionSeries sample_correction(const halfcar::SimulationResult& sim,
                                   std::span<const double> timestamps);

struct CorrectionOptions {
  Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
  /// Position of the pose origin relative to the pitch pivot (CoM), in body
  /// coordinates. Non-zero for a camera rigidly mounted on the ego body.
  Eigen::Vector3d mount_offset = Eigen::Vector3d::Zero();
};

/// translation += heave * up and rotation <- R_pitch * rotation, where
/// R_pitch turns by the pitch offset about the current body-y axis through
/// the pivot. Positive pitch lowers the front of the body.
PoseSequence apply_correction(const PoseSequence& seq, const CorrectionSeries& correction,
                              const CorrectionOptions& options = {});

/// Ground track of a pose sequence: CoM projected into plane coordinates and
/// the plane-projected body-x heading.
heightfield::Trajectory trajectory_from_poses(const PoseSequence& seq, const GroundPlane& plane);

/// Pose file: JSON object mapping vehicle id to an array of
/// {"t": s, "q": [w, x, y, z], "p": [x, y, z]}. A top-level "provenance" key
/// is reserved for metadata.
std::vector<PoseSequence> parse_pose_json(const nlohmann::json& doc);
nlohmann::json to_pose_json(std::span<const PoseSequence> sequences,
                            const std::optional<nlohmann::json>& provenance = std::nullopt);
std::vector<PoseSequence> read_pose_file(const std::filesystem::path& path);
void write_pose_file(std::span<const PoseSequence> sequences, const std::filesystem::path& path,
                     const std::optional<nlohmann::json>& provenance = std::nullopt);

/// CSV: t,z_s,theta,px,py,pz,qw,qx,qy,qz with the applied correction and
/// the corrected pose per frame.
void write_pose_csv(const PoseSequence& corrected, const CorrectionSeries& correction,
                    std::ostream& out);

}  // namespace roves::pose
