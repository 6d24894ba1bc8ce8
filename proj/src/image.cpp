#include "roves/image.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <fmt/format.h>

#include "roves/error.hpp"

namespace roves::image {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct DecodedPng {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;  // channels * width * height
};

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  auto* buffer = static_cast<std::string*>(png_get_error_ptr(png));
  if (buffer) *buffer = msg;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

DecodedPng decode_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw InputError(fmt::format("cannot open {}", path.string()));
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw InputError(fmt::format("{}: not a PNG file", path.string()));
  }

  std::string error;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("libpng initialisation failed");
  }

  DecodedPng out;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> raw;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError(fmt::format("{}: PNG decode error: {}", path.string(), error));
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const auto color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (png_get_bit_depth(png, info) == 16 && std::endian::native == std::endian::little) {
    png_set_swap(png);
  }
  png_read_update_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  raw.resize(rowbytes * out.height);
  rows.resize(out.height);
  for (std::uint32_t r = 0; r < out.height; ++r) rows[r] = raw.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (out.bit_depth == 16) {
    for (std::uint32_t r = 0; r < out.height; ++r) {
      std::memcpy(out.samples.data() + static_cast<std::size_t>(r) * out.width * out.channels,
                  rows[r], static_cast<std::size_t>(out.width) * out.channels * 2);
    }
  } else {
    for (std::uint32_t r = 0; r < out.height; ++r) {
      for (std::size_t k = 0; k < static_cast<std::size_t>(out.width) * out.channels; ++k) {
        out.samples[static_cast<std::size_t>(r) * out.width * out.channels + k] = rows[r][k];
      }
    }
  }
  return out;
}

void encode_png(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height,
                int color_type, int bit_depth, const std::vector<std::uint8_t>& bytes) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw InputError(fmt::format("cannot write {}", path.string()));
  std::string error;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error(fmt::format("{}: PNG encode error: {}", path.string(), error));
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  for (std::uint32_t r = 0; r < height; ++r) {
    png_write_row(png, const_cast<png_bytep>(bytes.data() + r * rowbytes));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

}  // namespace

std::size_t Mask::population() const {
  return static_cast<std::size_t>(std::count_if(data.begin(), data.end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  const auto png = decode_png(path);
  const double scale = png.bit_depth == 16 ? 65535.0 : 255.0;
  RgbImage img{png.width, png.height, {}};
  img.data.resize(img.pixel_count() * 3);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    for (int c = 0; c < 3; ++c) {
      // Gray and gray+alpha replicate the single luminance sample.
      const int src = png.channels >= 3 ? c : 0;
      img.data[p * 3 + c] = static_cast<float>(png.samples[p * png.channels + src] / scale);
    }
  }
  return img;
}

Mask read_mask_png(const std::filesystem::path& path) {
  const auto png = decode_png(path);
  Mask mask{png.width, png.height, {}};
  mask.data.resize(static_cast<std::size_t>(png.width) * png.height);
  for (std::size_t p = 0; p < mask.data.size(); ++p) {
    mask.data[p] = png.samples[p * png.channels] != 0 ? 1 : 0;
  }
  return mask;
}

GrayImage read_gray_png_raw(const std::filesystem::path& path) {
  const auto png = decode_png(path);
  GrayImage img{png.width, png.height, {}};
  img.data.resize(static_cast<std::size_t>(png.width) * png.height);
  for (std::size_t p = 0; p < img.data.size(); ++p) {
    img.data[p] = static_cast<float>(png.samples[p * png.channels]);
  }
  return img;
}

void write_rgb_png(const RgbImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(img.data.size());
  std::transform(img.data.begin(), img.data.end(), bytes.begin(), to_byte);
  encode_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 8, bytes);
}

void write_mask_png(const Mask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(mask.data.size());
  std::transform(mask.data.begin(), mask.data.end(), bytes.begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v ? 255 : 0; });
  encode_png(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, 8, bytes);
}

void write_gray16_png(const GrayImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(img.data.size() * 2);
  for (std::size_t p = 0; p < img.data.size(); ++p) {
    const auto v = static_cast<std::uint16_t>(std::lround(std::clamp(img.data[p], 0.0f, 65535.0f)));
    bytes[2 * p] = static_cast<std::uint8_t>(v >> 8);  // PNG is big-endian
    bytes[2 * p + 1] = static_cast<std::uint8_t>(v & 0xff);
  }
  encode_png(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, 16, bytes);
}

GrayImage read_depth_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  char magic[4];
  std::uint32_t dims[2];
  if (!in.read(magic, 4) || std::memcmp(magic, "RVDP", 4) != 0) {
    throw InputError(fmt::format("{}: not a raw depth grid (bad magic)", path.string()));
  }
  if (!in.read(reinterpret_cast<char*>(dims), sizeof(dims))) {
    throw InputError(fmt::format("{}: truncated raw depth header", path.string()));
  }
  GrayImage img{dims[0], dims[1], {}};
  if (static_cast<double>(img.width) * img.height > 5e8) {
    throw InputError(fmt::format("{}: implausible depth grid size", path.string()));
  }
  img.data.resize(static_cast<std::size_t>(img.width) * img.height);
  if (!in.read(reinterpret_cast<char*>(img.data.data()),
               static_cast<std::streamsize>(img.data.size() * sizeof(float)))) {
    throw InputError(fmt::format("{}: truncated raw depth payload (expected {} values)",
                                 path.string(), img.data.size()));
  }
  return img;
}

void write_depth_raw(const GrayImage& depth, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  const std::uint32_t dims[2] = {depth.width, depth.height};
  out.write("RVDP", 4);
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(depth.data.data()),
            static_cast<std::streamsize>(depth.data.size() * sizeof(float)));
}

GrayImage read_depth(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" ? read_gray_png_raw(path) : read_depth_raw(path);
}

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double c) {
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

GrayImage to_luma(const RgbImage& img) {
  GrayImage out{img.width, img.height, std::vector<float>(img.pixel_count())};
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const double r = srgb_to_linear(img.data[3 * p]);
    const double g = srgb_to_linear(img.data[3 * p + 1]);
    const double b = srgb_to_linear(img.data[3 * p + 2]);
    out.data[p] = static_cast<float>(0.2126 * r + 0.7152 * g + 0.0722 * b);
  }
  return out;
}

}  // namespace roves::image
