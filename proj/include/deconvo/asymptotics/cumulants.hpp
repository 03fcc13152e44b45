#pragma once

#include "../error.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace deconvo {

inline constexpr std::size_t min_cumulant_samples = 30;

//! Unbiased sample cumulants (k-statistics) k_1..k_max_order, max_order <= 4.
inline std::vector<double>
empirical_cumulants(std::span<const double> x, std::size_t max_order = 4)
{
  if (max_order < 1 || max_order > 4)
    throw std::invalid_argument("cumulant order must lie in 1..4");
  if (x.size() < min_cumulant_samples)
    throw InsufficientSamples("empirical cumulants need at least " +
                              std::to_string(min_cumulant_samples) + " samples, got " +
                              std::to_string(x.size()));
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x)
    mean += v;
  mean /= n;
  double s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double v : x) {
    const double e = v - mean, e2 = e * e;
    s2 += e2;
    s3 += e2 * e;
    s4 += e2 * e2;
  }
  std::vector<double> k{ mean,
                         s2 / (n - 1),
                         n * s3 / ((n - 1) * (n - 2)),
                         (n * (n + 1) * s4 - 3 * (n - 1) * s2 * s2) / ((n - 1) * (n - 2) * (n - 3)) };
  k.resize(max_order);
  return k;
}

} // namespace deconvo
