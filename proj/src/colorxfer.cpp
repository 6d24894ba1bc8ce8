#include "roves/colorxfer.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "roves/error.hpp"
#include "roves/image.hpp"
#include "roves/stats.hpp"

namespace roves::colorxfer {

namespace {

// Linear sRGB -> XYZ (D65).
const Eigen::Matrix3d& rgb_to_xyz_matrix() {
  static const Eigen::Matrix3d m = (Eigen::Matrix3d() << 0.4124564, 0.3575761, 0.1804375,
                                    0.2126729, 0.7151522, 0.0721750,
                                    0.0193339, 0.1191920, 0.9503041).finished();
  return m;
}

const Eigen::Matrix3d& xyz_to_rgb_matrix() {
  static const Eigen::Matrix3d m = rgb_to_xyz_matrix().inverse();
  return m;
}

const Eigen::Vector3d kWhite{0.95047, 1.0, 1.08883};

constexpr double kDelta = 6.0 / 29.0;

double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double f) {
  return f > kDelta ? f * f * f : 3.0 * kDelta * kDelta * (f - 4.0 / 29.0);
}

}  // namespace

Lab rgb_to_lab(const Rgb& rgb) {
  const Eigen::Vector3d lin(image::srgb_to_linear(rgb.r), image::srgb_to_linear(rgb.g),
                            image::srgb_to_linear(rgb.b));
  const Eigen::Vector3d xyz = rgb_to_xyz_matrix() * lin;
  const double fx = lab_f(xyz.x() / kWhite.x());
  const double fy = lab_f(xyz.y() / kWhite.y());
  const double fz = lab_f(xyz.z() / kWhite.z());
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Rgb lab_to_rgb_unclamped(const Lab& lab) {
  const double fy = (lab.L + 16.0) / 116.0;
  const double fx = fy + lab.a / 500.0;
  const double fz = fy - lab.b / 200.0;
  const Eigen::Vector3d xyz(kWhite.x() * lab_f_inv(fx), kWhite.y() * lab_f_inv(fy),
                            kWhite.z() * lab_f_inv(fz));
  const Eigen::Vector3d lin = xyz_to_rgb_matrix() * xyz;
  // Negative linear values have no sRGB encoding; keep their sign through
  // the linear segment so the clamp below sees them.
  auto encode = [](double c) { return c < 0.0 ? 12.92 * c : image::linear_to_srgb(c); };
  return {encode(lin.x()), encode(lin.y()), encode(lin.z())};
}

Rgb lab_to_rgb(const Lab& lab) {
  const Rgb rgb = lab_to_rgb_unclamped(lab);
  return {std::clamp(rgb.r, 0.0, 1.0), std::clamp(rgb.g, 0.0, 1.0), std::clamp(rgb.b, 0.0, 1.0)};
}

ChannelStats compute_stats(std::span<const std::array<double, 3>> colors,
                           const QuantileClip& clip) {
  if (colors.size() < 2) throw InputError("color statistics need at least 2 samples");
  if (!(clip.lo >= 0.0 && clip.lo <= clip.hi && clip.hi <= 1.0)) {
    throw InputError(fmt::format("bad quantile band [{}, {}]", clip.lo, clip.hi));
  }
  ChannelStats out;
  std::vector<double> channel(colors.size());
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < colors.size(); ++i) channel[i] = colors[i][c];
    const auto kept = stats::trim_to_quantiles(channel, clip.lo, clip.hi);
    if (kept.size() < 2) {
      throw InputError(fmt::format("only {} samples of channel {} survive quantile clipping",
                                   kept.size(), c));
    }
    out.mean[c] = stats::mean(kept);
    out.stddev[c] = stats::stddev(kept, out.mean[c]);
  }
  return out;
}

LabStats compute_stats(std::span<const Lab> colors, const QuantileClip& clip) {
  std::vector<std::array<double, 3>> triples;
  triples.reserve(colors.size());
  for (const auto& c : colors) triples.push_back({c.L, c.a, c.b});
  return compute_stats(std::span<const std::array<double, 3>>(triples), clip);
}

void TransferConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InputError(fmt::format("lambda must lie in [0, 1] (got {})", lambda));
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw InputError(fmt::format("beta must lie in [0, 1] (got {})", beta));
  }
}

namespace {

/// Per-channel affine map x -> (x - mu_src) / sd_src * sd_ref + mu_ref, or a
/// plain mean shift when the source has no spread.
struct ChannelMap {
  double scale = 1.0;
  double src_mean = 0.0;
  double ref_mean = 0.0;

  double operator()(double x) const { return (x - src_mean) * scale + ref_mean; }
};

ChannelMap matching_map(const ChannelStats& src, const ChannelStats& ref, int c,
                        const char* channel_name) {
  ChannelMap map{1.0, src.mean[c], ref.mean[c]};
  if (src.stddev[c] > 0.0) {
    map.scale = ref.stddev[c] / src.stddev[c];
  } else {
    spdlog::warn("source channel {} has zero spread; falling back to a mean shift", channel_name);
  }
  return map;
}

}  // namespace

std::vector<Lab> transfer(std::span<const Lab> src, const LabStats& src_stats,
                          const LabStats& ref_stats, const TransferConfig& config) {
  config.validate();
  const ChannelMap map_a = matching_map(src_stats, ref_stats, 1, "a");
  const ChannelMap map_b = matching_map(src_stats, ref_stats, 2, "b");
  const double l_shift = config.lambda * (ref_stats.mean[0] - src_stats.mean[0]);
  std::vector<Lab> out;
  out.reserve(src.size());
  for (const auto& c : src) out.push_back({c.L + l_shift, map_a(c.a), map_b(c.b)});
  return out;
}

std::vector<Rgb> transfer_rgb(std::span<const Rgb> src, const ChannelStats& src_stats,
                              const ChannelStats& ref_stats) {
  const ChannelMap map_r = matching_map(src_stats, ref_stats, 0, "r");
  const ChannelMap map_g = matching_map(src_stats, ref_stats, 1, "g");
  const ChannelMap map_b = matching_map(src_stats, ref_stats, 2, "b");
  std::vector<Rgb> out;
  out.reserve(src.size());
  for (const auto& c : src) {
    out.push_back({std::clamp(map_r(c.r), 0.0, 1.0), std::clamp(map_g(c.g), 0.0, 1.0),
                   std::clamp(map_b(c.b), 0.0, 1.0)});
  }
  return out;
}

Rgb blend(const Rgb& src, const Rgb& transferred, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw InputError(fmt::format("beta must lie in [0, 1] (got {})", beta));
  }
  return {(1.0 - beta) * src.r + beta * transferred.r, (1.0 - beta) * src.g + beta * transferred.g,
          (1.0 - beta) * src.b + beta * transferred.b};
}

std::vector<Rgb> harmonize(std::span<const Rgb> source, std::span<const Rgb> reference,
                           const HarmonizeOptions& options) {
  options.config.validate();
  const QuantileClip src_clip = options.clip_source ? options.reference_clip : QuantileClip::none();

  std::vector<Rgb> transferred;
  if (options.space == ColorSpace::kLab) {
    std::vector<Lab> src_lab, ref_lab;
    src_lab.reserve(source.size());
    ref_lab.reserve(reference.size());
    for (const auto& c : source) src_lab.push_back(rgb_to_lab(c));
    for (const auto& c : reference) ref_lab.push_back(rgb_to_lab(c));
    const auto src_stats = compute_stats(std::span<const Lab>(src_lab), src_clip);
    const auto ref_stats = compute_stats(std::span<const Lab>(ref_lab), options.reference_clip);
    const auto moved = transfer(src_lab, src_stats, ref_stats, options.config);
    transferred.reserve(moved.size());
    for (const auto& c : moved) transferred.push_back(lab_to_rgb(c));
  } else {
    auto triples = [](std::span<const Rgb> colors) {
      std::vector<std::array<double, 3>> t;
      t.reserve(colors.size());
      for (const auto& c : colors) t.push_back({c.r, c.g, c.b});
      return t;
    };
    const auto src_t = triples(source);
    const auto ref_t = triples(reference);
    transferred = transfer_rgb(source, compute_stats(std::span<const std::array<double, 3>>(src_t), src_clip),
                               compute_stats(std::span<const std::array<double, 3>>(ref_t),
                                             options.reference_clip));
  }

  std::vector<Rgb> out;
  out.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    out.push_back(blend(source[i], transferred[i], options.config.beta));
  }
  return out;
}

}  // namespace roves::colorxfer
