#include "roves/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "roves/error.hpp"

namespace roves::metrics {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError(fmt::format("series lengths differ ({} vs {})", a.size(), b.size()));
  }
  if (a.empty()) throw InputError("series are empty");
}

void check_kernel_fits(const image::GrayImage& img) {
  if (img.width < 3 || img.height < 3) {
    throw InputError(fmt::format("image {}x{} is smaller than the 3x3 kernel", img.width, img.height));
  }
}

}  // namespace

double rmse(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

ExtremaError extrema_error(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  ExtremaError e;
  e.peak = std::abs(*amax - *bmax);
  e.trough = std::abs(*amin - *bmin);
  e.value = std::max(e.peak, e.trough);
  return e;
}

double laplacian_variance(const image::GrayImage& img) {
  check_kernel_fits(img);
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (std::uint32_t r = 1; r + 1 < img.height; ++r) {
    for (std::uint32_t c = 1; c + 1 < img.width; ++c) {
      const double lap = double(img.at(r - 1, c)) + img.at(r + 1, c) + img.at(r, c - 1) +
                         img.at(r, c + 1) - 4.0 * img.at(r, c);
      sum += lap;
      sum_sq += lap * lap;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  return std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
}

double tenengrad(const image::GrayImage& img) {
  check_kernel_fits(img);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::uint32_t r = 1; r + 1 < img.height; ++r) {
    for (std::uint32_t c = 1; c + 1 < img.width; ++c) {
      auto p = [&](int dr, int dc) { return double(img.at(r + dr, c + dc)); };
      const double gx = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
      const double gy = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
      acc += gx * gx + gy * gy;
      ++n;
    }
  }
  return acc / static_cast<double>(n);
}

double ciede2000(const colorxfer::Lab& lab1, const colorxfer::Lab& lab2) {
  using std::atan2, std::cos, std::sin, std::sqrt, std::pow, std::exp, std::abs;
  constexpr double kPi = std::numbers::pi;
  auto deg = [](double rad) { return rad * 180.0 / kPi; };
  auto rad = [](double d) { return d * kPi / 180.0; };

  const double c1 = sqrt(lab1.a * lab1.a + lab1.b * lab1.b);
  const double c2 = sqrt(lab2.a * lab2.a + lab2.b * lab2.b);
  const double c_bar = 0.5 * (c1 + c2);
  const double c_bar7 = pow(c_bar, 7.0);
  const double g = 0.5 * (1.0 - sqrt(c_bar7 / (c_bar7 + pow(25.0, 7.0))));

  const double a1p = (1.0 + g) * lab1.a;
  const double a2p = (1.0 + g) * lab2.a;
  const double c1p = sqrt(a1p * a1p + lab1.b * lab1.b);
  const double c2p = sqrt(a2p * a2p + lab2.b * lab2.b);

  auto hue = [&](double b, double ap) {
    if (b == 0.0 && ap == 0.0) return 0.0;
    double h = deg(atan2(b, ap));
    return h < 0.0 ? h + 360.0 : h;
  };
  const double h1p = hue(lab1.b, a1p);
  const double h2p = hue(lab2.b, a2p);

  const double dLp = lab2.L - lab1.L;
  const double dCp = c2p - c1p;
  double dhp = 0.0;
  if (c1p * c2p != 0.0) {
    dhp = h2p - h1p;
    if (dhp > 180.0) dhp -= 360.0;
    else if (dhp < -180.0) dhp += 360.0;
  }
  const double dHp = 2.0 * sqrt(c1p * c2p) * sin(rad(dhp) / 2.0);

  const double L_bar = 0.5 * (lab1.L + lab2.L);
  const double cp_bar = 0.5 * (c1p + c2p);
  double hp_bar = h1p + h2p;
  if (c1p * c2p != 0.0) {
    if (abs(h1p - h2p) <= 180.0) hp_bar *= 0.5;
    else if (h1p + h2p < 360.0) hp_bar = 0.5 * (h1p + h2p + 360.0);
    else hp_bar = 0.5 * (h1p + h2p - 360.0);
  }

  const double t = 1.0 - 0.17 * cos(rad(hp_bar - 30.0)) + 0.24 * cos(rad(2.0 * hp_bar)) +
                   0.32 * cos(rad(3.0 * hp_bar + 6.0)) - 0.20 * cos(rad(4.0 * hp_bar - 63.0));
  const double d_theta = 30.0 * exp(-pow((hp_bar - 275.0) / 25.0, 2.0));
  const double cp_bar7 = pow(cp_bar, 7.0);
  const double r_c = 2.0 * sqrt(cp_bar7 / (cp_bar7 + pow(25.0, 7.0)));
  const double l50 = (L_bar - 50.0) * (L_bar - 50.0);
  const double s_l = 1.0 + 0.015 * l50 / sqrt(20.0 + l50);
  const double s_c = 1.0 + 0.045 * cp_bar;
  const double s_h = 1.0 + 0.015 * cp_bar * t;
  const double r_t = -sin(rad(2.0 * d_theta)) * r_c;

  const double tl = dLp / s_l;
  const double tc = dCp / s_c;
  const double th = dHp / s_h;
  return sqrt(tl * tl + tc * tc + th * th + r_t * tc * th);
}

colorxfer::Lab mean_lab(const image::RgbImage& img, const image::Mask* mask) {
  if (mask && (mask->width != img.width || mask->height != img.height)) {
    throw InputError("mask size does not match image size");
  }
  double L = 0.0, a = 0.0, b = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    if (mask && !mask->data[p]) continue;
    const auto lab = colorxfer::rgb_to_lab({img.data[3 * p], img.data[3 * p + 1], img.data[3 * p + 2]});
    L += lab.L;
    a += lab.a;
    b += lab.b;
    ++n;
  }
  if (n == 0) throw InputError("no pixels selected for the mean colour");
  const auto dn = static_cast<double>(n);
  return {L / dn, a / dn, b / dn};
}

double ciede2000_of_means(const image::RgbImage& a, const image::Mask* mask_a,
                          const image::RgbImage& b, const image::Mask* mask_b) {
  return ciede2000(mean_lab(a, mask_a), mean_lab(b, mask_b));
}

double ciede2000_per_pixel(const image::RgbImage& a, const image::Mask* mask_a,
                           const image::RgbImage& b, const image::Mask* mask_b) {
  if (a.width != b.width || a.height != b.height) {
    throw InputError("per-pixel Delta E needs equally sized images");
  }
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < a.pixel_count(); ++p) {
    if ((mask_a && !mask_a->data[p]) || (mask_b && !mask_b->data[p])) continue;
    const auto la = colorxfer::rgb_to_lab({a.data[3 * p], a.data[3 * p + 1], a.data[3 * p + 2]});
    const auto lb = colorxfer::rgb_to_lab({b.data[3 * p], b.data[3 * p + 1], b.data[3 * p + 2]});
    acc += ciede2000(la, lb);
    ++n;
  }
  if (n == 0) throw InputError("no pixels selected for per-pixel Delta E");
  return acc / static_cast<double>(n);
}

image::GrayImage box_blur(const image::GrayImage& img, int k) {
  if (k < 1) throw InputError("box blur size must be >= 1");
  const int lo = -(k - 1) / 2;
  const int hi = lo + k - 1;
  auto clampi = [](int v, int n) { return std::clamp(v, 0, n - 1); };
  image::GrayImage tmp = img, out = img;
  const int w = static_cast<int>(img.width), h = static_cast<int>(img.height);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int d = lo; d <= hi; ++d) acc += img.at(r, clampi(c + d, w));
      tmp.at(r, c) = static_cast<float>(acc / k);
    }
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int d = lo; d <= hi; ++d) acc += tmp.at(clampi(r + d, h), c);
      out.at(r, c) = static_cast<float>(acc / k);
    }
  }
  return out;
}

}  // namespace roves::metrics
