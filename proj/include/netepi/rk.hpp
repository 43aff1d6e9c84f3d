#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "netepi/error.hpp"

namespace netepi {

struct RkOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double initial_step = 1e-3;
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-14;
  std::size_t max_steps = 50'000'000;
};

/// Adaptive Dormand-Prince 5(4) integrator with FSAL and Hairer-style
/// step control. The right-hand side writes dy/dt into its last argument.
class DormandPrince {
 public:
  using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;

  DormandPrince(Rhs rhs, std::vector<double> y0, double t0, RkOptions opts = {})
      : rhs_(std::move(rhs)), opts_(opts), t_(t0), y_(std::move(y0)), h_(opts.initial_step) {
    const std::size_t n = y_.size();
    for (auto& k : k_) k.assign(n, 0.0);
    y_new_.assign(n, 0.0);
    y_stage_.assign(n, 0.0);
    rhs_(t_, y_, k_[0]);
  }

  double time() const noexcept { return t_; }
  std::span<const double> state() const noexcept { return y_; }
  /// dy/dt at the current time (FSAL slope).
  std::span<const double> derivative() const noexcept { return k_[0]; }
  std::size_t steps() const noexcept { return accepted_; }

  /// Takes one accepted step that does not pass `t_limit`.
  void step(double t_limit) {
    if (t_ >= t_limit) return;
    for (;;) {
      double h = std::min({h_, opts_.max_step, t_limit - t_});
      const bool lands = (t_ + h >= t_limit);
      if (lands) h = t_limit - t_;
      if (h < opts_.min_step && !lands) throw integration_error("step size underflow", t_);
      if (++attempts_ > opts_.max_steps) throw integration_error("step budget exhausted", t_);

      const double err = attempt(h);
      if (!std::isfinite(err)) {
        h_ = 0.25 * h;
        if (h_ < opts_.min_step) throw integration_error("non-finite state", t_);
        continue;
      }
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t_ = lands ? t_limit : t_ + h;
        std::swap(y_, y_new_);
        std::swap(k_[0], k_[6]);
        ++accepted_;
        // keep the proposed step for the next call unless we were clipped by t_limit
        if (!lands || factor < 1.0) h_ = h * factor;
        else h_ = std::max(h_, h * factor);
        return;
      }
      h_ = h * std::max(factor, 0.2);
      if (h_ < opts_.min_step) throw integration_error("step size underflow", t_);
    }
  }

  /// Advances to exactly `t_target` through as many steps as needed.
  void advance_to(double t_target) {
    while (t_ < t_target) step(t_target);
  }

 private:
  double attempt(double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    // difference between the 5th and embedded 4th order weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = y_.size();
    auto& [k1, k2, k3, k4, k5, k6, k7] = k_;
    for (std::size_t i = 0; i < n; ++i) y_stage_[i] = y_[i] + h * a21 * k1[i];
    rhs_(t_ + c2 * h, y_stage_, k2);
    for (std::size_t i = 0; i < n; ++i) y_stage_[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs_(t_ + c3 * h, y_stage_, k3);
    for (std::size_t i = 0; i < n; ++i) y_stage_[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs_(t_ + c4 * h, y_stage_, k4);
    for (std::size_t i = 0; i < n; ++i)
      y_stage_[i] = y_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs_(t_ + c5 * h, y_stage_, k5);
    for (std::size_t i = 0; i < n; ++i)
      y_stage_[i] = y_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs_(t_ + h, y_stage_, k6);
    for (std::size_t i = 0; i < n; ++i)
      y_new_[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs_(t_ + h, y_new_, k7);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = opts_.atol + opts_.rtol * std::max(std::abs(y_[i]), std::abs(y_new_[i]));
      sum += (err / scale) * (err / scale);
    }
    return std::sqrt(sum / static_cast<double>(n));
  }

  Rhs rhs_;
  RkOptions opts_;
  double t_;
  std::vector<double> y_;
  double h_;
  std::array<std::vector<double>, 7> k_;
  std::vector<double> y_new_, y_stage_;
  std::size_t accepted_ = 0;
  std::size_t attempts_ = 0;
};

}  // namespace netepi
