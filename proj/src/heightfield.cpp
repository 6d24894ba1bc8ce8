#include "roves/heightfield.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "roves/error.hpp"
#include "roves/stats.hpp"

namespace roves::heightfield {

namespace {

struct PlaneFit {
  Eigen::Vector3d normal;
  Eigen::Vector3d centroid;
};

PlaneFit fit_plane_pca(std::span<const Eigen::Vector3d> points) {
  if (points.size() < 3) throw InputError("plane fit needs at least 3 points");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d q = p - centroid;
    cov += q * q.transpose();
  }
  cov /= static_cast<double>(points.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d ev = eig.eigenvalues();  // ascending
  if (!(ev(2) > 0.0) || ev(1) <= 1e-12 * ev(2)) {
    throw InputError("plane fit: points are coincident or collinear");
  }
  return {eig.eigenvectors().col(0).normalized(), centroid};
}

}  // namespace

GroundPlane fit_ground_plane(std::span<const Eigen::Vector3d> points,
                             const Eigen::Vector3d& up) {
  PlaneFit fit = fit_plane_pca(points);

  std::vector<double> residuals;
  residuals.reserve(points.size());
  for (const auto& p : points) residuals.push_back(fit.normal.dot(p - fit.centroid));
  std::vector<double> sorted = residuals;
  std::sort(sorted.begin(), sorted.end());
  const double lo = stats::quantile_sorted(sorted, 0.02);
  const double hi = stats::quantile_sorted(sorted, 0.98);

  std::vector<Eigen::Vector3d> inliers;
  inliers.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (residuals[i] >= lo && residuals[i] <= hi) inliers.push_back(points[i]);
  }
  if (inliers.size() >= 3) {
    try {
      fit = fit_plane_pca(inliers);
    } catch (const InputError&) {
      // Trimming left a degenerate set; keep the untrimmed fit.
    }
  }

  GroundPlane plane;
  plane.normal = fit.normal.dot(up) < 0.0 ? Eigen::Vector3d(-fit.normal) : fit.normal;
  plane.offset = -plane.normal.dot(fit.centroid);
  return plane;
}

// ---------------------------------------------------------------------------

HeightField::HeightField(Eigen::Vector2d origin, double cell_size, std::uint32_t width,
                         std::uint32_t height, Accumulation mode)
    : origin_(std::move(origin)),
      cell_size_(cell_size),
      width_(width),
      height_(height),
      mode_(mode) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw InputError(fmt::format("height field cell size must be > 0 (got {})", cell_size));
  }
  if (!origin_.allFinite()) throw InputError("height field origin must be finite");
  const auto cells = static_cast<std::size_t>(width) * height;
  residuals_.assign(cells, 0.0f);
  counts_.assign(cells, 0);
}

Eigen::Vector2d HeightField::cell_center(std::uint32_t i, std::uint32_t j) const {
  return origin_ + cell_size_ * Eigen::Vector2d(i + 0.5, j + 0.5);
}

bool HeightField::accumulate(const Eigen::Vector2d& position, double residual) {
  const Eigen::Vector2d rel = (position - origin_) / cell_size_;
  const double fi = std::floor(rel.x());
  const double fj = std::floor(rel.y());
  if (fi < 0.0 || fj < 0.0 || fi >= width_ || fj >= height_) return false;
  const auto k = index(static_cast<std::uint32_t>(fi), static_cast<std::uint32_t>(fj));
  const auto r = static_cast<float>(residual);
  if (counts_[k] == 0) {
    residuals_[k] = r;
  } else if (mode_ == Accumulation::kMax) {
    residuals_[k] = std::max(residuals_[k], r);
  } else {
    residuals_[k] = std::min(residuals_[k], r);
  }
  ++counts_[k];
  return true;
}

void HeightField::set_cell(std::uint32_t i, std::uint32_t j, float residual,
                           std::uint32_t count) {
  const auto k = index(i, j);
  residuals_.at(k) = count > 0 ? residual : 0.0f;
  counts_.at(k) = count;
}

std::uint64_t HeightField::total_count() const {
  std::uint64_t total = 0;
  for (auto c : counts_) total += c;
  return total;
}

std::pair<float, float> HeightField::occupied_range() const {
  float lo = std::numeric_limits<float>::infinity();
  float hi = -std::numeric_limits<float>::infinity();
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    if (counts_[k] == 0) continue;
    lo = std::min(lo, residuals_[k]);
    hi = std::max(hi, residuals_[k]);
  }
  if (lo > hi) return {0.0f, 0.0f};
  return {lo, hi};
}

HeightField build_heightfield(std::span<const Eigen::Vector3d> points, const GroundPlane& plane,
                              double cell_size, Accumulation mode) {
  if (points.empty()) throw InputError("height field needs at least one point");
  if (!(cell_size > 0.0)) {
    throw InputError(fmt::format("height field cell size must be > 0 (got {})", cell_size));
  }
  plane.validate();

  std::vector<Eigen::Vector2d> coords;
  coords.reserve(points.size());
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  for (const auto& p : points) {
    if (!p.allFinite()) throw InputError("height field input contains a non-finite point");
    coords.push_back(plane.to_plane(p));
    lo = lo.cwiseMin(coords.back());
    hi = hi.cwiseMax(coords.back());
  }

  const Eigen::Vector2d origin = lo.array() - cell_size;
  const Eigen::Vector2d span = (hi - lo) / cell_size;
  const double w = std::floor(span.x()) + 3.0;
  const double h = std::floor(span.y()) + 3.0;
  if (w * h > 1e9) {
    throw InputError(fmt::format("height field of {} x {} cells is too large; raise the cell size",
                                 w, h));
  }
  HeightField field(origin, cell_size, static_cast<std::uint32_t>(w),
                    static_cast<std::uint32_t>(h), mode);
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!field.accumulate(coords[k], plane.height_of(points[k]))) {
      // Unreachable by construction of the bounds.
      throw std::logic_error("height field point fell outside the grid");
    }
  }
  return field;
}

double sample_height(const HeightField& field, const Eigen::Vector2d& position) {
  const Eigen::Vector2d rel = (position - field.origin()) / field.cell_size();
  if (!(rel.x() >= 0.0 && rel.y() >= 0.0 && rel.x() <= field.width() &&
        rel.y() <= field.height())) {
    return 0.0;
  }
  const double gx = rel.x() - 0.5;
  const double gy = rel.y() - 0.5;
  const double fx = std::floor(gx);
  const double fy = std::floor(gy);
  const double tx = gx - fx;
  const double ty = gy - fy;

  auto value = [&](double ci, double cj) -> double {
    if (ci < 0.0 || cj < 0.0 || ci >= field.width() || cj >= field.height()) return 0.0;
    const auto i = static_cast<std::uint32_t>(ci);
    const auto j = static_cast<std::uint32_t>(cj);
    return field.occupied(i, j) ? static_cast<double>(field.residual(i, j)) : 0.0;
  };
  return (1.0 - tx) * (1.0 - ty) * value(fx, fy) + tx * (1.0 - ty) * value(fx + 1, fy) +
         (1.0 - tx) * ty * value(fx, fy + 1) + tx * ty * value(fx + 1, fy + 1);
}

// ---------------------------------------------------------------------------

void Trajectory::validate() const {
  if (samples.empty()) throw InputError("trajectory is empty");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    if (!std::isfinite(s.t) || !s.position.allFinite() || !s.heading.allFinite()) {
      throw InputError(fmt::format("trajectory sample {} is not finite", k));
    }
    if (std::abs(s.heading.norm() - 1.0) > 1e-6) {
      throw InputError(fmt::format("trajectory sample {} heading is not unit length", k));
    }
    if (k > 0 && !(s.t > samples[k - 1].t)) {
      throw InputError(fmt::format("trajectory timestamps not strictly increasing at sample {}", k));
    }
  }
}

Trajectory Trajectory::straight(const Eigen::Vector2d& start, const Eigen::Vector2d& heading,
                                double speed, double t0, double t1, double rate) {
  if (!(rate > 0.0) || !(t1 >= t0)) throw InputError("straight trajectory: bad time range");
  const Eigen::Vector2d dir = heading.normalized();
  Trajectory traj;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) * rate + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    const double dt = static_cast<double>(k) / rate;
    traj.samples.push_back({t0 + dt, start + speed * dt * dir, dir});
  }
  return traj;
}

TrajectorySample Trajectory::at(double t) const {
  if (samples.empty()) throw InputError("trajectory is empty");
  if (t <= samples.front().t) return {t, samples.front().position, samples.front().heading};
  if (t >= samples.back().t) return {t, samples.back().position, samples.back().heading};
  const auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                   [](double v, const TrajectorySample& s) { return v < s.t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  Eigen::Vector2d heading = (1.0 - w) * a.heading + w * b.heading;
  heading = heading.norm() > 1e-12 ? heading.normalized() : a.heading;
  return {t, (1.0 - w) * a.position + w * b.position, heading};
}

halfcar::RoadExcitation excitation_along(const HeightField& field, const Trajectory& trajectory,
                                         const halfcar::VehicleParams& params, double dt) {
  trajectory.validate();
  if (!(dt > 0.0)) throw InputError("excitation sampling step must be > 0");
  const double t0 = trajectory.samples.front().t;
  const double span = trajectory.samples.back().t - t0;
  const auto n = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));

  std::vector<halfcar::ContactHeights> series;
  series.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const auto s = trajectory.at(t0 + static_cast<double>(i) * dt);
    const Eigen::Vector2d front = s.position + params.front_arm * s.heading;
    const Eigen::Vector2d rear = s.position - params.rear_arm * s.heading;
    series.push_back({sample_height(field, front), sample_height(field, rear)});
  }
  return halfcar::RoadExcitation::sampled(
      0.0, dt, std::move(series),
      fmt::format("height field ({} x {} cells of {} m) along {}-sample trajectory",
                  field.width(), field.height(), field.cell_size(),
                  trajectory.samples.size()));
}

// ---------------------------------------------------------------------------
// Files

namespace {

constexpr char kGridMagic[4] = {'R', 'V', 'H', 'F'};
constexpr std::uint32_t kGridVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary grid I/O assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  const auto offset = static_cast<long long>(in.tellg());
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw InputError(fmt::format("{}: truncated grid file at byte {}", path.string(), offset));
  }
  return value;
}

}  // namespace

void save_grid(const HeightField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  out.write(kGridMagic, 4);
  put<std::uint32_t>(out, kGridVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(field.mode()));
  for (int k = 0; k < 7; ++k) put<std::uint8_t>(out, 0);
  put<double>(out, field.origin().x());
  put<double>(out, field.origin().y());
  put<double>(out, field.cell_size());
  put<std::uint32_t>(out, field.width());
  put<std::uint32_t>(out, field.height());
  for (std::uint32_t j = 0; j < field.height(); ++j) {
    for (std::uint32_t i = 0; i < field.width(); ++i) put<float>(out, field.residual(i, j));
  }
  const std::size_t cells = static_cast<std::size_t>(field.width()) * field.height();
  std::vector<std::uint8_t> bitmap((cells + 7) / 8, 0);
  for (std::size_t k = 0; k < cells; ++k) {
    const auto i = static_cast<std::uint32_t>(k % field.width());
    const auto j = static_cast<std::uint32_t>(k / field.width());
    if (field.occupied(i, j)) bitmap[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
  }
  out.write(reinterpret_cast<const char*>(bitmap.data()),
            static_cast<std::streamsize>(bitmap.size()));
  if (!out) throw InputError(fmt::format("failed writing {}", path.string()));
}

HeightField load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kGridMagic, 4) != 0) {
    throw InputError(fmt::format("{}: not a height field grid (bad magic)", path.string()));
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kGridVersion) {
    throw InputError(fmt::format("{}: unsupported grid version {}", path.string(), version));
  }
  const auto mode = get<std::uint8_t>(in, path);
  if (mode > 1) throw InputError(fmt::format("{}: bad accumulation mode {}", path.string(), mode));
  in.seekg(7, std::ios::cur);
  const double ox = get<double>(in, path);
  const double oy = get<double>(in, path);
  const double cell = get<double>(in, path);
  const auto w = get<std::uint32_t>(in, path);
  const auto h = get<std::uint32_t>(in, path);
  if (static_cast<double>(w) * h > 1e9) {
    throw InputError(fmt::format("{}: implausible grid size {} x {}", path.string(), w, h));
  }
  HeightField field({ox, oy}, cell, w, h, static_cast<Accumulation>(mode));
  const std::size_t cells = static_cast<std::size_t>(w) * h;
  std::vector<float> residuals(cells);
  for (auto& r : residuals) r = get<float>(in, path);
  std::vector<std::uint8_t> bitmap((cells + 7) / 8);
  for (auto& b : bitmap) b = get<std::uint8_t>(in, path);
  for (std::size_t k = 0; k < cells; ++k) {
    if (bitmap[k / 8] & (1u << (k % 8))) {
      field.set_cell(static_cast<std::uint32_t>(k % w), static_cast<std::uint32_t>(k / w),
                     residuals[k], 1);
    }
  }
  return field;
}

void save_pgm(const HeightField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  auto [lo, hi] = field.occupied_range();
  lo = std::min(lo, 0.0f);
  hi = std::max(hi, 0.0f);
  const double range = hi > lo ? static_cast<double>(hi) - lo : 1.0;
  out << "P5\n" << field.width() << ' ' << field.height() << "\n65535\n";
  // Top row of the image is the largest v so the picture is not mirrored.
  for (std::uint32_t jj = field.height(); jj-- > 0;) {
    for (std::uint32_t i = 0; i < field.width(); ++i) {
      const double r = field.occupied(i, jj) ? field.residual(i, jj) : 0.0;
      const auto level = static_cast<std::uint16_t>(std::lround((r - lo) / range * 65535.0));
      const char bytes[2] = {static_cast<char>(level >> 8), static_cast<char>(level & 0xff)};
      out.write(bytes, 2);
    }
  }
}

}  // namespace roves::heightfield
