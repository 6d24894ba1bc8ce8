#pragma once

#include <array>
#include <span>
#include <vector>

namespace roves::colorxfer {

struct Rgb {
  double r = 0.0, g = 0.0, b = 0.0;
};

/// CIE L*a*b* under the D65 white point.
struct Lab {
  double L = 0.0, a = 0.0, b = 0.0;
};

/// sRGB in [0,1] -> CIE Lab (D65).
Lab rgb_to_lab(const Rgb& rgb);
/// CIE Lab -> sRGB, clamped to [0,1].
Rgb lab_to_rgb(const Lab& lab);
/// Same without the final clamp.
Rgb lab_to_rgb_unclamped(const Lab& lab);

/// Per-channel mean and population standard deviation. For Lab inputs the
/// channels are (L, a, b); for RGB inputs (r, g, b).
struct ChannelStats {
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{};
};
using LabStats = ChannelStats;

/// Quantile band applied independently per channel before the moments are
/// taken. {0, 1} keeps everything.
struct QuantileClip {
  double lo = 0.02;
  double hi = 0.98;

  static QuantileClip none() { return {0.0, 1.0}; }
};

ChannelStats compute_stats(std::span<const std::array<double, 3>> colors,
                           const QuantileClip& clip = {});
LabStats compute_stats(std::span<const Lab> colors, const QuantileClip& clip = {});

/// lambda weights the L mean shift; beta blends source and transferred RGB.
struct TransferConfig {
  double lambda = 0.2;
  double beta = 0.75;

  void validate() const;
};

/// a,b: mean/variance matching; L: mean shift weighted by lambda. A source
/// channel with zero spread degrades to a pure mean shift.
std::vector<Lab> transfer(std::span<const Lab> src, const LabStats& src_stats,
                          const LabStats& ref_stats, const TransferConfig& config);

/// The same per-channel mean/variance matching applied to raw RGB (all three
/// channels matched), for the RGB-space ablation.
std::vector<Rgb> transfer_rgb(std::span<const Rgb> src, const ChannelStats& src_stats,
                              const ChannelStats& ref_stats);

/// (1 - beta) * src + beta * transferred, per channel.
Rgb blend(const Rgb& src, const Rgb& transferred, double beta);

enum class ColorSpace { kLab, kRgb };

struct HarmonizeOptions {
  TransferConfig config{};
  ColorSpace space = ColorSpace::kLab;
  QuantileClip reference_clip{};
  /// Clip the source statistics with the same band as the reference.
  bool clip_source = false;
};

/// Full pipeline: statistics, transfer, conversion back to RGB and blend.
std::vector<Rgb> harmonize(std::span<const Rgb> source, std::span<const Rgb> reference,
                           const HarmonizeOptions& options = {});

}  // namespace roves::colorxfer
