#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "netepi/error.hpp"

namespace netepi {

/// Probability law on the nonnegative integers with finite support.
///
/// Parametric laws (Poisson) are truncated once the remaining tail mass
/// drops below `tail_mass` and renormalized, so every sum below runs over a
/// finite support. Values are immutable after construction.
class DegreeDistribution {
 public:
  enum class Kind { pmf, poisson, point_mass };

  static constexpr double default_tail_mass = 1e-12;

  /// Explicit pmf; index k holds the probability of degree k.
  static DegreeDistribution from_pmf(std::vector<double> probs) {
    if (probs.empty()) throw config_error("pmf must not be empty");
    double total = 0.0;
    for (double p : probs) {
      if (!std::isfinite(p) || p < 0.0) throw config_error("pmf entries must be finite and >= 0");
      total += p;
    }
    if (!(total > 0.0)) throw config_error("pmf must have positive total mass");
    if (std::abs(total - 1.0) > 1e-6) throw config_error("pmf entries must sum to 1");
    return DegreeDistribution(Kind::pmf, 0.0, 0.0, std::move(probs));
  }

  /// Empirical law from per-degree counts.
  static DegreeDistribution from_counts(std::span<const std::size_t> counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (!(total > 0.0)) throw config_error("histogram is empty");
    std::vector<double> probs(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) probs[k] = static_cast<double>(counts[k]) / total;
    return DegreeDistribution(Kind::pmf, 0.0, 0.0, std::move(probs));
  }

  static DegreeDistribution point_mass(std::size_t k) {
    std::vector<double> probs(k + 1, 0.0);
    probs[k] = 1.0;
    return DegreeDistribution(Kind::point_mass, static_cast<double>(k), 0.0, std::move(probs));
  }

  static DegreeDistribution poisson(double mean, double tail_mass = default_tail_mass) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw config_error("Poisson mean must be > 0");
    if (!(tail_mass > 0.0 && tail_mass < 1.0)) throw config_error("tail mass must be in (0,1)");
    // Evaluate far enough that the neglected remainder is far below tail_mass.
    const auto kmax = static_cast<std::size_t>(mean + 40.0 * std::sqrt(mean) + 60.0);
    std::vector<double> raw(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k) {
      const double kd = static_cast<double>(k);
      raw[k] = std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
    }
    // smallest K whose tail beyond K is below tail_mass
    double tail = 0.0;
    std::size_t cut = kmax;
    for (std::size_t k = kmax; k > 0; --k) {
      if (tail + raw[k] >= tail_mass) break;
      tail += raw[k];
      cut = k - 1;
    }
    raw.resize(cut + 1);
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (double& p : raw) p /= total;
    return DegreeDistribution(Kind::poisson, mean, tail_mass, std::move(raw));
  }

  Kind kind() const noexcept { return kind_; }
  /// Poisson mean or point-mass location; 0 for explicit pmfs.
  double parameter() const noexcept { return parameter_; }
  double tail_mass() const noexcept { return tail_mass_; }

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t max_degree() const noexcept { return probs_.size() - 1; }

  /// Smallest k with positive mass.
  std::size_t min_degree() const noexcept {
    for (std::size_t k = 0; k < probs_.size(); ++k)
      if (probs_[k] > 0.0) return k;
    return 0;
  }

  double pmf(std::size_t k) const noexcept { return k < probs_.size() ? probs_[k] : 0.0; }

  double moment(int p) const {
    if (p < 1 || p > 3) throw config_error("moment order must be 1, 2 or 3");
    double m = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) m += std::pow(static_cast<double>(k), p) * probs_[k];
    return m;
  }

  double mean() const { return moment(1); }

  /// M(x) = sum_k p(k) e^{kx}, defined for x <= 0.
  double laplace(double x) const {
    check_nonpositive(x);
    double m = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k)
      if (probs_[k] > 0.0) m += probs_[k] * std::exp(static_cast<double>(k) * x);
    return m;
  }

  /// M'(x) = sum_k k p(k) e^{kx}, defined for x <= 0.
  double laplace_derivative(double x) const {
    check_nonpositive(x);
    double m = 0.0;
    for (std::size_t k = 1; k < probs_.size(); ++k)
      if (probs_[k] > 0.0) m += static_cast<double>(k) * probs_[k] * std::exp(static_cast<double>(k) * x);
    return m;
  }

  /// Law of a uniformly chosen neighbor's remaining degree:
  /// q(k) = (k+1) p(k+1) / sum_j j p(j).
  DegreeDistribution size_biased() const {
    const double m = mean();
    if (!(m > 0.0)) throw config_error("size-biasing needs a law with positive mean");
    std::vector<double> q(std::max<std::size_t>(probs_.size(), 2) - 1, 0.0);
    for (std::size_t k = 0; k + 1 < probs_.size(); ++k)
      q[k] = static_cast<double>(k + 1) * probs_[k + 1] / m;
    Kind kind = Kind::pmf;
    double param = 0.0;
    if (kind_ == Kind::point_mass) {
      kind = Kind::point_mass;
      param = parameter_ - 1.0;
    } else if (kind_ == Kind::poisson) {
      kind = Kind::poisson;
      param = parameter_;
    }
    return DegreeDistribution(kind, param, tail_mass_, std::move(q));
  }

  /// M'(-z)/M(-z) for z >= 0, i.e. the mean of this law tilted by e^{-kz}.
  /// Weights are shifted by the minimum degree so large z does not underflow.
  double phi(double z) const {
    if (z < 0.0) throw config_error("phi is defined for z >= 0");
    const std::size_t k0 = min_degree();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = k0; k < probs_.size(); ++k) {
      if (probs_[k] <= 0.0) continue;
      const double w = probs_[k] * std::exp(-static_cast<double>(k - k0) * z);
      num += static_cast<double>(k) * w;
      den += w;
    }
    return num / den;
  }

  double total_variation(const DegreeDistribution& other) const {
    const std::size_t n = std::max(probs_.size(), other.probs_.size());
    double tv = 0.0;
    for (std::size_t k = 0; k < n; ++k) tv += std::abs(pmf(k) - other.pmf(k));
    return 0.5 * tv;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::poisson:
        return "poisson(" + std::to_string(parameter_) + ")";
      case Kind::point_mass:
        return "regular(" + std::to_string(static_cast<std::size_t>(parameter_)) + ")";
      case Kind::pmf:
        break;
    }
    return "pmf";
  }

 private:
  DegreeDistribution(Kind kind, double parameter, double tail_mass, std::vector<double> probs)
      : kind_(kind), parameter_(parameter), tail_mass_(tail_mass), probs_(std::move(probs)) {
    // trailing zeros carry no information and would skew max_degree()
    while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();
    const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
    if (total != 1.0)
      for (double& p : probs_) p /= total;
  }

  static void check_nonpositive(double x) {
    if (x > 0.0 || std::isnan(x)) throw config_error("Laplace transform is defined for x <= 0");
  }

  Kind kind_;
  double parameter_;
  double tail_mass_;
  std::vector<double> probs_;
};

}  // namespace netepi
