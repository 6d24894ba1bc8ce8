#pragma once

#include <span>
#include <vector>

namespace roves::stats {

/// Linearly interpolated quantile (p in [0,1]) of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

/// Keeps the values lying inside the [lo, hi] quantile band of `values`.
/// Returned values are sorted ascending.
std::vector<double> trim_to_quantiles(std::span<const double> values, double lo,
                                      double hi);

double mean(std::span<const double> values);

/// Population standard deviation.
double stddev(std::span<const double> values, double mean);

}  // namespace roves::stats
