#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "netepi/error.hpp"

namespace netepi {

/// Sample mean with a normal-approximation 95% interval,
/// mean +- 1.96 sd / sqrt(M).
struct MeanCI {
  double mean = 0.0;
  double sd = 0.0;
  double half_width = 0.0;
  std::size_t count = 0;

  double lo() const { return mean - half_width; }
  double hi() const { return mean + half_width; }
};

inline MeanCI mean_ci(std::span<const double> xs) {
  if (xs.empty()) throw config_error("mean_ci needs at least one sample");
  MeanCI out;
  out.count = xs.size();
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  out.half_width = 1.96 * out.sd / std::sqrt(static_cast<double>(xs.size()));
  return out;
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
  if (sample.empty()) throw config_error("ks_statistic needs a sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double f = cdf(sample[k]);
    d = std::max({d, (static_cast<double>(k) + 1.0) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

/// Asymptotic p-value P(K > sqrt(n) D) of the Kolmogorov distribution, with
/// the usual small-sample correction sqrt(n) + 0.12 + 0.11 / sqrt(n).
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace netepi
