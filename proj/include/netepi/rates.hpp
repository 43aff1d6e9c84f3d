#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netepi/error.hpp"

namespace netepi {

/// Continuous, strictly positive rate function of time (events per unit time).
///
/// Constructors reject parameters that would let the rate touch zero.
/// `upper_bound`/`lower_bound` return bounds over a closed interval; they are
/// exact for every kind except `quotient`, whose bounds are conservative.
class RateFunction {
 public:
  struct Constant {
    double value;
  };
  /// v0 before t0, v1 after t1, linear in between.
  struct Ramp {
    double v0, v1, t0, t1;
  };
  /// base + amplitude * sin((t + phase * period) * 2 pi / period)
  struct Sinusoid {
    double base, amplitude, period, phase;
  };
  /// Linear interpolation between knots, constant extension outside.
  struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;
  };
  struct Quotient {
    std::shared_ptr<const RateFunction> num, den;
  };

  using Spec = std::variant<Constant, Ramp, Sinusoid, PiecewiseLinear, Quotient>;

  static RateFunction constant(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) throw config_error("constant rate must be > 0");
    return RateFunction(Constant{value});
  }

  static RateFunction ramp(double v0, double v1, double t0, double t1) {
    if (!(v0 > 0.0) || !(v1 > 0.0) || !std::isfinite(v0) || !std::isfinite(v1))
      throw config_error("ramp endpoint values must be > 0");
    if (!(t1 > t0)) throw config_error("ramp requires t0 < t1");
    return RateFunction(Ramp{v0, v1, t0, t1});
  }

  static RateFunction sinusoid(double base, double amplitude, double period, double phase = 0.0) {
    if (!(base > 0.0)) throw config_error("sinusoid base must be > 0");
    if (!(amplitude >= 0.0)) throw config_error("sinusoid amplitude must be >= 0");
    if (!(amplitude < base)) throw config_error("sinusoid amplitude must be below base (positivity)");
    if (!(period > 0.0)) throw config_error("sinusoid period must be > 0");
    if (!std::isfinite(phase)) throw config_error("sinusoid phase must be finite");
    return RateFunction(Sinusoid{base, amplitude, period, phase});
  }

  static RateFunction piecewise_linear(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) throw config_error("piecewise-linear rate needs at least one knot");
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (!(knots[i].second > 0.0) || !std::isfinite(knots[i].second))
        throw config_error("piecewise-linear knot values must be > 0");
      if (i > 0 && !(knots[i].first > knots[i - 1].first))
        throw config_error("piecewise-linear knot times must be strictly increasing");
    }
    return RateFunction(PiecewiseLinear{std::move(knots)});
  }

  static RateFunction quotient(RateFunction num, RateFunction den) {
    return RateFunction(Quotient{std::make_shared<const RateFunction>(std::move(num)),
                                 std::make_shared<const RateFunction>(std::move(den))});
  }

  const Spec& spec() const noexcept { return spec_; }

  bool is_constant() const noexcept { return std::holds_alternative<Constant>(spec_); }

  double evaluate(double t) const {
    if (t < 0.0) throw config_error("rates are defined for t >= 0");
    return value(t);
  }

  double operator()(double t) const { return evaluate(t); }

  double upper_bound(double t0, double t1) const { return bound(t0, t1, true); }
  double lower_bound(double t0, double t1) const { return bound(t0, t1, false); }

  std::string describe() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return "constant(" + std::to_string(s.value) + ")";
          } else if constexpr (std::is_same_v<T, Ramp>) {
            return "ramp(" + std::to_string(s.v0) + "->" + std::to_string(s.v1) + " on [" +
                   std::to_string(s.t0) + "," + std::to_string(s.t1) + "])";
          } else if constexpr (std::is_same_v<T, Sinusoid>) {
            return "sin(base=" + std::to_string(s.base) + ",A=" + std::to_string(s.amplitude) +
                   ",period=" + std::to_string(s.period) + ",phase=" + std::to_string(s.phase) + ")";
          } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
            return "pwl(" + std::to_string(s.knots.size()) + " knots)";
          } else {
            return "(" + s.num->describe() + ")/(" + s.den->describe() + ")";
          }
        },
        spec_);
  }

 private:
  explicit RateFunction(Spec spec) : spec_(std::move(spec)) {}

  static double ramp_value(const Ramp& r, double t) {
    if (t <= r.t0) return r.v0;
    if (t >= r.t1) return r.v1;
    return r.v0 + (r.v1 - r.v0) * (t - r.t0) / (r.t1 - r.t0);
  }

  static double pwl_value(const PiecewiseLinear& p, double t) {
    const auto& k = p.knots;
    if (t <= k.front().first) return k.front().second;
    if (t >= k.back().first) return k.back().second;
    const auto it = std::upper_bound(k.begin(), k.end(), t,
                                     [](double x, const auto& knot) { return x < knot.first; });
    const auto& [ta, va] = *(it - 1);
    const auto& [tb, vb] = *it;
    return va + (vb - va) * (t - ta) / (tb - ta);
  }

  static double angle(const Sinusoid& s, double t) {
    return (t + s.phase * s.period) * 2.0 * std::numbers::pi / s.period;
  }

  double value(double t) const {
    return std::visit(
        [t](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return s.value;
          } else if constexpr (std::is_same_v<T, Ramp>) {
            return ramp_value(s, t);
          } else if constexpr (std::is_same_v<T, Sinusoid>) {
            return s.base + s.amplitude * std::sin(angle(s, t));
          } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
            return pwl_value(s, t);
          } else {
            return s.num->value(t) / s.den->value(t);
          }
        },
        spec_);
  }

  // Whether some t in [t0, t1] has angle == target (mod 2 pi).
  static bool sinusoid_hits(const Sinusoid& s, double t0, double t1, double target) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double a0 = angle(s, t0);
    const double a1 = angle(s, t1);
    const double first = target + two_pi * std::ceil((a0 - target) / two_pi);
    return first <= a1;
  }

  double bound(double t0, double t1, bool upper) const {
    if (t0 > t1) std::swap(t0, t1);
    const auto pick = [upper](double a, double b) { return upper ? std::max(a, b) : std::min(a, b); };
    return std::visit(
        [&](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return s.value;
          } else if constexpr (std::is_same_v<T, Ramp>) {
            return pick(ramp_value(s, t0), ramp_value(s, t1));
          } else if constexpr (std::is_same_v<T, Sinusoid>) {
            const double target = upper ? std::numbers::pi / 2.0 : 3.0 * std::numbers::pi / 2.0;
            if (t1 - t0 >= s.period || sinusoid_hits(s, t0, t1, target))
              return upper ? s.base + s.amplitude : s.base - s.amplitude;
            return pick(value(t0), value(t1));
          } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
            double b = pick(pwl_value(s, t0), pwl_value(s, t1));
            for (const auto& [tk, vk] : s.knots)
              if (tk > t0 && tk < t1) b = pick(b, vk);
            return b;
          } else {
            return upper ? s.num->upper_bound(t0, t1) / s.den->lower_bound(t0, t1)
                         : s.num->lower_bound(t0, t1) / s.den->upper_bound(t0, t1);
          }
        },
        spec_);
  }

  Spec spec_;
};

/// numerator(t) / denominator(t)
inline double ratio(const RateFunction& numerator, const RateFunction& denominator, double t) {
  return numerator.evaluate(t) / denominator.evaluate(t);
}

inline RateFunction divide(RateFunction num, RateFunction den) {
  return RateFunction::quotient(std::move(num), std::move(den));
}

}  // namespace netepi
