#include "roves/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "roves/error.hpp"

namespace roves::stats {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  if (sorted.size() == 1) return sorted.front();
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> trim_to_quantiles(std::span<const double> values, double lo,
                                      double hi) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) return sorted;
  const double q_lo = quantile_sorted(sorted, lo);
  const double q_hi = quantile_sorted(sorted, hi);
  std::vector<double> kept;
  kept.reserve(sorted.size());
  for (double v : sorted) {
    if (v >= q_lo && v <= q_hi) kept.push_back(v);
  }
  return kept;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw InputError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double stddev(std::span<const double> values, double mean) {
  if (values.empty()) throw InputError("stddev of an empty sample");
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

}  // namespace roves::stats
