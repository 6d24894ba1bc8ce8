#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "roves/error.hpp"
#include "roves/heightfield.hpp"
#include "support.hpp"

using namespace roves;
using namespace roves::heightfield;

namespace {

std::vector<Eigen::Vector3d> hump_points(double amplitude, double length, double width, int nx, int ny) {
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < nx; ++i) {
    const double x = length * i / (nx - 1);
    const double z = amplitude * std::sin(std::numbers::pi * x / length);
    for (int j = 0; j < ny; ++j) pts.emplace_back(x, -width / 2 + width * j / (ny - 1), z);
  }
  return pts;
}

}  // namespace

TEST_SUITE("heightfield") {
  TEST_CASE("plane through points on z = 0") {
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) pts.emplace_back(i * 0.3, j * 0.2 - 1.0, 0.0);
    }
    const auto plane = fit_ground_plane(pts);
    CHECK(plane.normal.z() == doctest::Approx(1.0));
    CHECK(std::abs(plane.normal.x()) < 1e-12);
    CHECK(std::abs(plane.normal.y()) < 1e-12);
    CHECK(std::abs(plane.offset) < 1e-12);
  }

  TEST_CASE("plane fit trims a distant outlier") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 1000; ++i) pts.emplace_back(u(rng), u(rng), 0.1);
    pts.emplace_back(0.3, 0.2, 5.0);
    const auto plane = fit_ground_plane(pts);
    // The inliers are exactly z = 0.1, so least squares on them alone gives
    // normal (0, 0, 1) and offset -0.1.
    CHECK(std::abs(plane.height_of({1.0, -2.0, 0.1})) < 1e-6);
    CHECK(std::abs(plane.height_of({-4.0, 3.0, 0.1})) < 1e-6);
    CHECK((plane.normal - Eigen::Vector3d::UnitZ()).norm() < 1e-6);
    CHECK(plane.offset == doctest::Approx(-0.1).epsilon(1e-6));
  }

  TEST_CASE("tilted plane normal is recovered") {
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 30; ++i) {
      for (int j = 0; j < 30; ++j) {
        const double x = i * 0.2 - 3.0, y = j * 0.2 - 3.0;
        pts.emplace_back(x, y, 0.01 * x);
      }
    }
    const auto plane = fit_ground_plane(pts);
    const Eigen::Vector3d truth = Eigen::Vector3d(-0.01, 0.0, 1.0).normalized();
    const double angle = std::acos(std::clamp(plane.normal.dot(truth), -1.0, 1.0));
    CHECK(angle < 1e-6);
  }

  TEST_CASE("plane normal faces the requested up direction") {
    std::vector<Eigen::Vector3d> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    CHECK(fit_ground_plane(pts, -Eigen::Vector3d::UnitZ()).normal.z() == doctest::Approx(-1.0));
  }

  TEST_CASE("degenerate plane input is rejected") {
    std::vector<Eigen::Vector3d> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    CHECK_THROWS_AS(fit_ground_plane(line), InputError);
    std::vector<Eigen::Vector3d> two{{0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(fit_ground_plane(two), InputError);
  }

  TEST_CASE("single point fills one cell") {
    const std::vector<Eigen::Vector3d> pts{{1.0, 2.0, 0.08}};
    const auto f = build_heightfield(pts, GroundPlane{}, 0.05, Accumulation::kMax);
    CHECK(f.width() == 3);
    CHECK(f.height() == 3);
    std::size_t occupied = 0;
    for (std::uint32_t j = 0; j < f.height(); ++j) {
      for (std::uint32_t i = 0; i < f.width(); ++i) {
        if (f.occupied(i, j)) {
          ++occupied;
          CHECK(f.residual(i, j) == doctest::Approx(0.08));
        } else {
          CHECK(f.residual(i, j) == 0.0f);
        }
      }
    }
    CHECK(occupied == 1);
    CHECK(f.occupied(1, 1));
  }

  TEST_CASE("max and min accumulation inside one cell") {
    const std::vector<Eigen::Vector3d> pts{{0.01, 0.01, 0.05}, {0.02, 0.02, 0.08}};
    const auto hi = build_heightfield(pts, GroundPlane{}, 0.05, Accumulation::kMax);
    const auto lo = build_heightfield(pts, GroundPlane{}, 0.05, Accumulation::kMin);
    CHECK(hi.residual(1, 1) == doctest::Approx(0.08));
    CHECK(lo.residual(1, 1) == doctest::Approx(0.05));
    CHECK(hi.count(1, 1) == 2);
  }

  TEST_CASE("hump crest matches the analytic profile") {
    const auto pts = hump_points(0.07, 0.4, 3.0, 401, 61);
    const double cell = 0.05;
    const auto f = build_heightfield(pts, GroundPlane{}, cell, Accumulation::kMax);
    const auto [lo, hi] = f.occupied_range();
    // Cell maxima see the true crest because samples are dense.
    CHECK(hi == doctest::Approx(0.07).epsilon(1e-6));
    CHECK(lo >= 0.0f);
    // Any single cell differs from the profile at its centre by at most the
    // profile variation across half a cell.
    const double slope = 0.07 * std::numbers::pi / 0.4;
    for (std::uint32_t i = 0; i < f.width(); ++i) {
      if (!f.occupied(i, f.height() / 2)) continue;
      const double x = f.cell_center(i, f.height() / 2).x();
      const double truth = x < 0 || x > 0.4 ? 0.0 : 0.07 * std::sin(std::numbers::pi * x / 0.4);
      CHECK(std::abs(f.residual(i, f.height() / 2) - truth) <= slope * cell / 2 + 1e-9);
    }
  }

  TEST_CASE("every point lands in exactly one cell") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 5000; ++i) pts.emplace_back(u(rng), u(rng), 0.05 * u(rng));
    const auto f = build_heightfield(pts, GroundPlane{}, 0.07, Accumulation::kMax);
    CHECK(f.total_count() == pts.size());
  }

  TEST_CASE("grid honours a tilted plane") {
    GroundPlane plane;
    plane.normal = Eigen::Vector3d(0.0, -0.1, 1.0).normalized();
    plane.offset = 0.0;
    const double base_z = -(plane.normal.x() * 0.3 + plane.normal.y() * 0.4) / plane.normal.z();
    const Eigen::Vector3d on_plane(0.3, 0.4, base_z);
    REQUIRE(std::abs(plane.height_of(on_plane)) < 1e-12);
    const Eigen::Vector3d lifted = on_plane + 0.06 * plane.normal;
    const std::vector<Eigen::Vector3d> pts{lifted};
    const auto f = build_heightfield(pts, plane, 0.05, Accumulation::kMax);
    CHECK(f.occupied_range().second == doctest::Approx(0.06));
  }

  TEST_CASE("sampling: outside, cell centre and midpoint") {
    HeightField f({0.0, 0.0}, 0.1, 4, 3, Accumulation::kMax);
    f.set_cell(1, 1, 0.02f);
    f.set_cell(2, 1, 0.06f);
    CHECK(sample_height(f, {50.0, -20.0}) == 0.0);
    CHECK(sample_height(f, f.cell_center(2, 1)) == doctest::Approx(0.06));
    const Eigen::Vector2d mid = 0.5 * (f.cell_center(1, 1) + f.cell_center(2, 1));
    CHECK(sample_height(f, mid) == doctest::Approx(0.04));
  }

  TEST_CASE("sampling stays within the occupied range") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 400; ++i) pts.emplace_back(u(rng), u(rng), 0.1 * u(rng));
    const auto f = build_heightfield(pts, GroundPlane{}, 0.1, Accumulation::kMax);
    const auto [lo, hi] = f.occupied_range();
    for (int k = 0; k < 2000; ++k) {
      const double h = sample_height(f, {1.5 * u(rng), 1.5 * u(rng)});
      CHECK(h <= std::max<double>(hi, 0.0) + 1e-12);
      CHECK(h >= std::min<double>(lo, 0.0) - 1e-12);
    }
  }

  TEST_CASE("max field dominates min field cell by cell") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 3000; ++i) pts.emplace_back(u(rng), u(rng), 0.1 * u(rng));
    const auto hi = build_heightfield(pts, GroundPlane{}, 0.1, Accumulation::kMax);
    const auto lo = build_heightfield(pts, GroundPlane{}, 0.1, Accumulation::kMin);
    REQUIRE(hi.width() == lo.width());
    for (std::uint32_t j = 0; j < hi.height(); ++j) {
      for (std::uint32_t i = 0; i < hi.width(); ++i) {
        CHECK(hi.occupied(i, j) == lo.occupied(i, j));
        if (hi.occupied(i, j)) CHECK(hi.residual(i, j) >= lo.residual(i, j));
      }
    }
  }

  TEST_CASE("trajectory interpolation and validation") {
    const auto traj = Trajectory::straight({0.0, 0.0}, {1.0, 0.0}, 2.0, 0.0, 1.0, 10.0);
    CHECK(traj.samples.size() == 11);
    CHECK(traj.at(0.25).position.x() == doctest::Approx(0.5));
    CHECK(traj.at(-1.0).position.x() == doctest::Approx(0.0));
    CHECK(traj.at(5.0).position.x() == doctest::Approx(2.0));
    Trajectory bad = traj;
    bad.samples[3].t = bad.samples[2].t;
    CHECK_THROWS_AS(bad.validate(), InputError);
    CHECK_THROWS_AS(excitation_along(HeightField({0, 0}, 0.1, 3, 3, Accumulation::kMax), Trajectory{},
                                     halfcar::VehicleParams::ego(), 1e-3),
                    InputError);
  }

  TEST_CASE("empty field gives zero excitation") {
    HeightField f({-1.0, -1.0}, 0.1, 20, 20, Accumulation::kMax);
    const auto traj = Trajectory::straight({-5.0, 0.0}, {1.0, 0.0}, 5.0, 0.0, 2.0, 10.0);
    const auto ex = excitation_along(f, traj, halfcar::VehicleParams::ego(), 1e-2);
    for (double t = 0.0; t <= 2.0; t += 0.01) {
      CHECK(ex.at(t).front == 0.0);
      CHECK(ex.at(t).rear == 0.0);
    }
  }

  TEST_CASE("stationary vehicle on a plateau sees constant excitation") {
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i <= 400; ++i) {
      for (int j = 0; j <= 80; ++j) pts.emplace_back(-5.0 + 0.025 * i, -1.0 + 0.025 * j, 0.05);
    }
    const auto f = build_heightfield(pts, GroundPlane{}, 0.05, Accumulation::kMax);
    Trajectory traj;
    traj.samples = {{0.0, {0.0, 0.0}, {1.0, 0.0}}, {1.0, {0.0, 0.0}, {1.0, 0.0}}};
    const auto ex = excitation_along(f, traj, halfcar::VehicleParams::ego(), 1e-2);
    for (double t = 0.0; t <= 1.0; t += 0.05) {
      CHECK(ex.at(t).front == doctest::Approx(0.05));
      CHECK(ex.at(t).rear == doctest::Approx(0.05));
    }
  }

  TEST_CASE("rear excitation repeats the front one after the wheelbase delay") {
    const auto pts = hump_points(0.07, 0.4, 3.0, 81, 31);
    const auto f = build_heightfield(pts, GroundPlane{}, 0.05, Accumulation::kMax);
    const auto p = halfcar::VehicleParams::ego();
    const double v = 5.0, dt = 1e-3;
    const auto traj = Trajectory::straight({-10.0, 0.0}, {1.0, 0.0}, v, 0.0, 4.0, 10.0);
    const auto ex = excitation_along(f, traj, p, dt);
    const auto delay = static_cast<std::size_t>(std::llround(p.wheelbase() / v / dt));
    double worst = 0.0;
    for (std::size_t k = 0; k + delay <= 4000; ++k) {
      worst = std::max(worst, std::abs(ex.at((k + delay) * dt).rear - ex.at(k * dt).front));
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("grid file round trip") {
    testing::TempDir dir("hf");
    HeightField f({-1.25, 0.5}, 0.05, 7, 5, Accumulation::kMin);
    f.set_cell(0, 0, -0.03f);
    f.set_cell(6, 4, 0.01f);
    f.set_cell(3, 2, 0.0f);
    save_grid(f, dir / "g.rvhf");
    const auto bytes = testing::read_bytes(dir / "g.rvhf");
    REQUIRE(bytes.size() == 16 + 24 + 8 + 4 * 35 + 5);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "RVHF");
    CHECK(bytes[8] == 1);
    const auto g = load_grid(dir / "g.rvhf");
    CHECK(g.mode() == Accumulation::kMin);
    CHECK(g.origin() == f.origin());
    CHECK(g.cell_size() == f.cell_size());
    for (std::uint32_t j = 0; j < 5; ++j) {
      for (std::uint32_t i = 0; i < 7; ++i) {
        CHECK(g.occupied(i, j) == f.occupied(i, j));
        CHECK(g.residual(i, j) == f.residual(i, j));
      }
    }
    save_grid(g, dir / "h.rvhf");
    CHECK(testing::read_bytes(dir / "h.rvhf") == bytes);

    auto truncated = bytes;
    truncated.resize(30);
    {
      std::ofstream out(dir / "t.rvhf", std::ios::binary);
      out.write(reinterpret_cast<const char*>(truncated.data()), truncated.size());
    }
    CHECK_THROWS_AS(load_grid(dir / "t.rvhf"), InputError);
  }

  TEST_CASE("debug PGM export") {
    testing::TempDir dir("pgm");
    HeightField f({0.0, 0.0}, 0.1, 4, 2, Accumulation::kMax);
    f.set_cell(0, 0, 0.0f);
    f.set_cell(3, 1, 0.07f);
    save_pgm(f, dir / "f.pgm");
    const auto text = testing::read_text(dir / "f.pgm");
    CHECK(text.rfind("P5\n4 2\n65535\n", 0) == 0);
    CHECK(text.size() == std::string("P5\n4 2\n65535\n").size() + 16);
  }
}
