#include "roves/pose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "roves/error.hpp"

namespace roves::pose {

void PoseSequence::validate() const {
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    if (!std::isfinite(f.t) || !f.translation.allFinite() || !f.rotation.coeffs().allFinite()) {
      throw InputError(fmt::format("vehicle '{}' frame {} is not finite", vehicle_id, k));
    }
    if (std::abs(f.rotation.norm() - 1.0) > 1e-6) {
      throw InputError(fmt::format("vehicle '{}' frame {} rotation is not a unit quaternion",
                                   vehicle_id, k));
    }
    if (k > 0 && !(f.t > frames[k - 1].t)) {
      throw InputError(fmt::format("vehicle '{}' timestamps not strictly increasing at frame {}",
                                   vehicle_id, k));
    }
  }
}

std::vector<double> PoseSequence::timestamps() const {
  std::vector<double> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.t);
  return out;
}

PoseSequence edit_pose(const PoseSequence& seq, const PoseEdit& edit) {
  PoseSequence out = seq;
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Translate>) {
          for (auto& f : out.frames) f.translation += op.offset;
        } else if constexpr (std::is_same_v<T, Rotate>) {
          Eigen::Quaterniond dq = op.rotation;
          if (!(dq.norm() > 0.0)) throw InputError("rotation edit quaternion is zero");
          if (std::abs(dq.norm() - 1.0) > 1e-12) {
            spdlog::warn("rotation edit quaternion has norm {}; normalizing", dq.norm());
            dq.normalize();
          }
          for (auto& f : out.frames) f.rotation = (dq * f.rotation).normalized();
        } else {
          if (op.begin > op.end || op.end > seq.frames.size()) {
            throw InputError(fmt::format("delete range [{}, {}) outside {} frames of '{}'",
                                         op.begin, op.end, seq.frames.size(), seq.vehicle_id));
          }
          out.frames.erase(out.frames.begin() + static_cast<std::ptrdiff_t>(op.begin),
                           out.frames.begin() + static_cast<std::ptrdiff_t>(op.end));
        }
      },
      edit);
  return out;
}

CorrectionSeries sample_correction(const halfcar::SimulationResult& sim,
                                   std::span<const double> timestamps) {
  if (sim.time.empty()) throw InputError("cannot sample an empty simulation");
  const double t_first = sim.time.front();
  const double t_last = sim.time.back();
  constexpr double kSlack = 1e-9;

  CorrectionSeries out;
  out.heave.reserve(timestamps.size());
  out.pitch.reserve(timestamps.size());
  for (std::size_t k = 0; k < timestamps.size(); ++k) {
    const double t = timestamps[k];
    if (!(t >= t_first - kSlack && t <= t_last + kSlack)) {
      throw InputError(fmt::format("frame {} at t = {} s lies outside the simulated interval "
                                   "[{}, {}] s",
                                   k, t, t_first, t_last));
    }
    auto it = std::upper_bound(sim.time.begin(), sim.time.end(), t);
    if (it == sim.time.begin()) ++it;
    if (it == sim.time.end()) --it;
    const std::size_t hi = static_cast<std::size_t>(it - sim.time.begin());
    const std::size_t lo = hi == 0 ? 0 : hi - 1;
    if (lo == hi) {
      out.heave.push_back(sim.states[lo].z_s);
      out.pitch.push_back(sim.states[lo].theta);
      continue;
    }
    const double w = std::clamp((t - sim.time[lo]) / (sim.time[hi] - sim.time[lo]), 0.0, 1.0);
    const auto& a = sim.states[lo];
    const auto& b = sim.states[hi];
    out.heave.push_back(a.z_s + w * (b.z_s - a.z_s));
    out.pitch.push_back(a.theta + w * (b.theta - a.theta));
  }
  return out;
}

PoseSequence apply_correction(const PoseSequence& seq, const CorrectionSeries& correction,
                              const CorrectionOptions& options) {
  if (correction.heave.size() != seq.frames.size() ||
      correction.pitch.size() != seq.frames.size()) {
    throw InputError(fmt::format("correction has {} frames but '{}' has {}", correction.size(),
                                 seq.vehicle_id, seq.frames.size()));
  }
  if (std::abs(options.up.norm() - 1.0) > 1e-9) throw InputError("up vector must be unit length");

  PoseSequence out = seq;
  for (std::size_t k = 0; k < out.frames.size(); ++k) {
    auto& f = out.frames[k];
    const Eigen::Matrix3d base = f.rotation.toRotationMatrix();
    const Eigen::Vector3d lateral = base.col(1);
    const Eigen::Quaterniond pitch(Eigen::AngleAxisd(correction.pitch[k], lateral));
    const Eigen::Vector3d pivot = f.translation - base * options.mount_offset;
    f.rotation = (pitch * f.rotation).normalized();
    f.translation = pivot + correction.heave[k] * options.up + pitch * (base * options.mount_offset);
  }
  return out;
}

heightfield::Trajectory trajectory_from_poses(const PoseSequence& seq, const GroundPlane& plane) {
  if (seq.frames.empty()) {
    throw InputError(fmt::format("vehicle '{}' has no frames", seq.vehicle_id));
  }
  heightfield::Trajectory traj;
  traj.samples.reserve(seq.frames.size());
  for (std::size_t k = 0; k < seq.frames.size(); ++k) {
    const auto& f = seq.frames[k];
    Eigen::Vector2d heading = plane.direction_to_plane(f.rotation * Eigen::Vector3d::UnitX());
    if (heading.norm() < 1e-9) {
      throw InputError(fmt::format("vehicle '{}' frame {} points straight along the plane normal",
                                   seq.vehicle_id, k));
    }
    traj.samples.push_back({f.t, plane.to_plane(f.translation), heading.normalized()});
  }
  return traj;
}

// ---------------------------------------------------------------------------
// JSON / CSV

std::vector<PoseSequence> parse_pose_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("pose file must be a JSON object keyed by vehicle id");
  std::vector<PoseSequence> out;
  for (const auto& [id, frames] : doc.items()) {
    if (id == "provenance") continue;
    if (!frames.is_array()) {
      throw InputError(fmt::format("pose entry '{}' must be an array of frames", id));
    }
    PoseSequence seq{id, {}};
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const auto& f = frames[k];
      try {
        const auto q = f.at("q").get<std::vector<double>>();
        const auto p = f.at("p").get<std::vector<double>>();
        if (q.size() != 4 || p.size() != 3) throw InputError("q needs 4 and p needs 3 numbers");
        PoseFrame frame;
        frame.t = f.at("t").get<double>();
        frame.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
        frame.translation = Eigen::Vector3d(p[0], p[1], p[2]);
        seq.frames.push_back(frame);
      } catch (const nlohmann::json::exception& e) {
        throw InputError(fmt::format("pose entry '{}' frame {}: {}", id, k, e.what()));
      } catch (const InputError& e) {
        throw InputError(fmt::format("pose entry '{}' frame {}: {}", id, k, e.what()));
      }
    }
    seq.validate();
    out.push_back(std::move(seq));
  }
  return out;
}

nlohmann::json to_pose_json(std::span<const PoseSequence> sequences,
                            const std::optional<nlohmann::json>& provenance) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& seq : sequences) {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : seq.frames) {
      frames.push_back({{"t", f.t},
                        {"q", {f.rotation.w(), f.rotation.x(), f.rotation.y(), f.rotation.z()}},
                        {"p", {f.translation.x(), f.translation.y(), f.translation.z()}}});
    }
    doc[seq.vehicle_id] = std::move(frames);
  }
  if (provenance) doc["provenance"] = *provenance;
  return doc;
}

std::vector<PoseSequence> read_pose_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_pose_json(doc);
}

void write_pose_file(std::span<const PoseSequence> sequences, const std::filesystem::path& path,
                     const std::optional<nlohmann::json>& provenance) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  out << to_pose_json(sequences, provenance).dump(2) << '\n';
}

void write_pose_csv(const PoseSequence& corrected, const CorrectionSeries& correction,
                    std::ostream& out) {
  out << "t,z_s,theta,px,py,pz,qw,qx,qy,qz\n";
  for (std::size_t k = 0; k < corrected.frames.size(); ++k) {
    const auto& f = corrected.frames[k];
    out << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n",
                       f.t, correction.heave.at(k), correction.pitch.at(k), f.translation.x(),
                       f.translation.y(), f.translation.z(), f.rotation.w(), f.rotation.x(),
                       f.rotation.y(), f.rotation.z());
  }
}

}  // namespace roves::pose
