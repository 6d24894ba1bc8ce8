#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace roves::image {

/// Interleaved RGB, channel values in [0,1], row-major.
struct RgbImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<float> data;  // 3 * width * height

  float at(std::uint32_t row, std::uint32_t col, int channel) const {
    return data[(static_cast<std::size_t>(row) * width + col) * 3 + channel];
  }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Single-channel float image, row-major.
struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<float> data;

  float at(std::uint32_t row, std::uint32_t col) const {
    return data[static_cast<std::size_t>(row) * width + col];
  }
  float& at(std::uint32_t row, std::uint32_t col) {
    return data[static_cast<std::size_t>(row) * width + col];
  }
};

/// Boolean mask (nonzero = foreground), row-major.
struct Mask {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> data;

  bool at(std::uint32_t row, std::uint32_t col) const {
    return data[static_cast<std::size_t>(row) * width + col] != 0;
  }
  std::size_t population() const;
};

/// 8-bit PNG of any color type is expanded to RGB (alpha dropped).
RgbImage read_rgb_png(const std::filesystem::path& path);
/// 8- or 16-bit gray PNG, nonzero = foreground.
Mask read_mask_png(const std::filesystem::path& path);
/// Gray PNG as raw sample values (0..255 or 0..65535) without normalization.
GrayImage read_gray_png_raw(const std::filesystem::path& path);

void write_rgb_png(const RgbImage& img, const std::filesystem::path& path);
void write_mask_png(const Mask& mask, const std::filesystem::path& path);
/// Writes values rounded and clamped to [0, 65535] as 16-bit gray.
void write_gray16_png(const GrayImage& img, const std::filesystem::path& path);

/// Raw depth grid: "RVDP" magic, u32 width, u32 height (12-byte header)
/// followed by row-major little-endian f32 values.
GrayImage read_depth_raw(const std::filesystem::path& path);
void write_depth_raw(const GrayImage& depth, const std::filesystem::path& path);

/// Reads depth by extension: ".png" (16-bit linear) or anything else as raw.
GrayImage read_depth(const std::filesystem::path& path);

/// sRGB transfer function and its inverse on [0,1].
double srgb_to_linear(double c);
double linear_to_srgb(double c);

/// BT.709 luma of the linearized sRGB values.
GrayImage to_luma(const RgbImage& img);

}  // namespace roves::image
