#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "roves/gaussians.hpp"

namespace roves::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("roves_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Random cloud with every attribute populated and unit quaternions.
inline gaussians::GaussianCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  gaussians::GaussianCloud c;
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.positions.push_back({10 * u(rng), 10 * u(rng), u(rng)});
    c.sh_dc.push_back({u(rng), u(rng), u(rng)});
    std::array<float, gaussians::kShRestCount> rest{};
    for (auto& v : rest) v = 0.1f * u(rng);
    c.sh_rest.push_back(rest);
    c.opacities.push_back(3 * u(rng));
    c.log_scales.push_back({-5 + u(rng), -5 + u(rng), -5 + u(rng)});
    float q[4] = {u(rng), u(rng), u(rng), u(rng)};
    const float norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    c.rotations.push_back({q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm});
  }
  return c;
}

}  // namespace roves::testing
