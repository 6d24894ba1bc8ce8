#pragma once

#include <span>
#include <vector>

#include "roves/colorxfer.hpp"
#include "roves/image.hpp"

namespace roves::metrics {

/// Root mean square difference of two equal-length series.
double rmse(std::span<const double> a, std::span<const double> b);

/// Peak and trough discrepancies of two series; `value` is the larger one.
struct ExtremaError {
  double peak = 0.0;    // |max(a) - max(b)|
  double trough = 0.0;  // |min(a) - min(b)|
  double value = 0.0;
};
ExtremaError extrema_error(std::span<const double> a, std::span<const double> b);

/// Population variance of the 4-neighbour Laplacian over interior pixels.
double laplacian_variance(const image::GrayImage& img);

/// Mean of Gx^2 + Gy^2 (3x3 Sobel) over interior pixels.
double tenengrad(const image::GrayImage& img);

/// CIEDE2000 colour difference with k_L = k_C = k_H = 1.
double ciede2000(const colorxfer::Lab& lab1, const colorxfer::Lab& lab2);

/// Mean Lab colour of the masked pixels (all pixels when mask is empty).
colorxfer::Lab mean_lab(const image::RgbImage& img, const image::Mask* mask = nullptr);

/// Delta E between the mean colours of two regions.
double ciede2000_of_means(const image::RgbImage& a, const image::Mask* mask_a,
                          const image::RgbImage& b, const image::Mask* mask_b);

/// Mean of per-pixel Delta E between two equally sized images over pixels
/// selected by both masks.
double ciede2000_per_pixel(const image::RgbImage& a, const image::Mask* mask_a,
                           const image::RgbImage& b, const image::Mask* mask_b);

/// Separable k x k box filter with edge replication.
image::GrayImage box_blur(const image::GrayImage& img, int k);

}  // namespace roves::metrics
