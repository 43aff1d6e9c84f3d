#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "netepi/config.hpp"
#include "netepi/rates.hpp"

using netepi::config_error;
using netepi::RateFunction;

TEST(Evaluate, Examples) {
  EXPECT_EQ(RateFunction::constant(1.0).evaluate(7.0), 1.0);
  for (double a : {0.0, 0.3, 0.9})
    for (double delta : {0.0, 0.125, 0.4})
      EXPECT_NEAR(RateFunction::sinusoid(1.0, a, 2.0, delta).evaluate(0.0),
                  1.0 + a * std::sin(delta * 2 * std::numbers::pi), 1e-15);
  EXPECT_DOUBLE_EQ(RateFunction::ramp(0.5, 1.5, 0.0, 10.0).evaluate(5.0), 1.0);
  EXPECT_DOUBLE_EQ(RateFunction::ramp(0.5, 1.5, 0.0, 10.0).evaluate(50.0), 1.5);
}

TEST(Evaluate, PiecewiseLinear) {
  const auto r = RateFunction::piecewise_linear({{1.0, 2.0}, {3.0, 4.0}, {4.0, 1.0}});
  EXPECT_DOUBLE_EQ(r(0.0), 2.0);
  EXPECT_DOUBLE_EQ(r(2.0), 3.0);
  EXPECT_DOUBLE_EQ(r(3.5), 2.5);
  EXPECT_DOUBLE_EQ(r(100.0), 1.0);
}

TEST(Evaluate, RejectsNegativeTime) { EXPECT_THROW(RateFunction::constant(1.0).evaluate(-1e-9), config_error); }

TEST(Construct, RejectsNonPositive) {
  EXPECT_THROW(RateFunction::constant(0.0), config_error);
  EXPECT_THROW(RateFunction::sinusoid(1.0, 1.0, 1.0), config_error);
  EXPECT_THROW(RateFunction::sinusoid(1.0, 1.5, 1.0), config_error);
  EXPECT_THROW(RateFunction::sinusoid(1.0, 0.5, 0.0), config_error);
  EXPECT_THROW(RateFunction::ramp(0.0, 1.0, 0.0, 1.0), config_error);
  EXPECT_THROW(RateFunction::ramp(1.0, 1.0, 2.0, 1.0), config_error);
  EXPECT_THROW(RateFunction::piecewise_linear({{0.0, 1.0}, {0.0, 2.0}}), config_error);
  EXPECT_THROW(RateFunction::piecewise_linear({{0.0, 1.0}, {1.0, 0.0}}), config_error);
}

TEST(UpperBound, Examples) {
  EXPECT_EQ(RateFunction::constant(2.0).upper_bound(0.0, 5.0), 2.0);
  EXPECT_NEAR(RateFunction::sinusoid(1.0, 0.5, 1.0, 0.0).upper_bound(0.0, 1.0), 1.5, 1e-15);
  EXPECT_NEAR(RateFunction::ramp(0.5, 1.5, 0.0, 10.0).upper_bound(0.0, 4.0), 0.9, 1e-15);
  // a short window away from the crest is bounded by its endpoints
  const auto s = RateFunction::sinusoid(1.0, 0.5, 4.0, 0.0);
  EXPECT_NEAR(s.upper_bound(1.5, 2.0), s(1.5), 1e-15);
}

TEST(Ratio, Examples) {
  EXPECT_DOUBLE_EQ(netepi::ratio(RateFunction::constant(1.0), RateFunction::constant(2.0), 3.3), 0.5);
  const auto ramp = RateFunction::ramp(0.5, 1.5, 0.0, 10.0);
  for (double t : {0.0, 2.5, 9.0, 20.0}) EXPECT_DOUBLE_EQ(netepi::ratio(ramp, ramp, t), 1.0);
  const auto curve = RateFunction::sinusoid(1.5, 1.0, 2.0, 0.0);
  const auto beta = netepi::divide(ramp, curve);
  for (double t = 0.0; t < 12.0; t += 0.37)
    EXPECT_NEAR(netepi::ratio(ramp, beta, t), 1.5 + std::sin(std::numbers::pi * t), 1e-12);
}

TEST(RateProperties, SinusoidAveragesToBase) {
  for (double a : {0.2, 0.7})
    for (double period : {0.5, 1.0, 10.0})
      for (double phase : {0.0, 0.3}) {
        const auto s = RateFunction::sinusoid(1.3, a, period, phase);
        // composite Simpson over one period; the integrand is smooth and periodic
        const int n = 2000;
        const double h = period / n;
        double sum = s(0.0) + s(period);
        for (int k = 1; k < n; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * s(k * h);
        EXPECT_NEAR(sum * h / 3.0 / period, 1.3, 1e-8);
      }
}

TEST(RateProperties, BoundsEncloseValues) {
  const std::vector<RateFunction> rates = {
      RateFunction::constant(0.7),
      RateFunction::ramp(0.5, 1.5, 2.0, 10.0),
      RateFunction::ramp(3.0, 0.2, 0.0, 4.0),
      RateFunction::sinusoid(1.0, 0.9, 1.7, 0.3),
      RateFunction::piecewise_linear({{0.5, 1.0}, {1.0, 5.0}, {3.0, 0.5}, {3.1, 2.0}}),
      netepi::divide(RateFunction::ramp(0.5, 1.5, 0.0, 10.0), RateFunction::sinusoid(1.5, 1.0, 2.0, 0.0)),
  };
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 12.0);
  for (const auto& r : rates) {
    for (int rep = 0; rep < 20; ++rep) {
      double t0 = u(gen), t1 = u(gen);
      if (t0 > t1) std::swap(t0, t1);
      const double ub = r.upper_bound(t0, t1);
      const double lb = r.lower_bound(t0, t1);
      for (int k = 0; k < 1000; ++k) {
        const double t = t0 + (t1 - t0) * k / 999.0;
        ASSERT_GE(ub, r(t) * (1 - 1e-14)) << r.describe() << " at t=" << t;
        ASSERT_LE(lb, r(t) * (1 + 1e-14)) << r.describe() << " at t=" << t;
      }
    }
  }
}

TEST(RateConfig, ParsesAllKinds) {
  using netepi::json;
  EXPECT_DOUBLE_EQ(netepi::parse_rate(json::parse(R"({"kind":"constant","value":2})"))(1.0), 2.0);
  EXPECT_DOUBLE_EQ(netepi::parse_rate(json::parse("0.5"))(1.0), 0.5);
  EXPECT_DOUBLE_EQ(netepi::parse_rate(json::parse(R"({"kind":"ramp","from":0.5,"to":1.5,"t0":0,"t1":10})"))(5.0), 1.0);
  EXPECT_NEAR(netepi::parse_rate(json::parse(R"({"kind":"sin","base":1,"amplitude":0.5,"period":4,"phase":0})"))(1.0),
              1.5, 1e-15);
  EXPECT_DOUBLE_EQ(netepi::parse_rate(json::parse(R"({"kind":"pwl","knots":[[0,1],[2,3]]})"))(1.0), 2.0);
  EXPECT_DOUBLE_EQ(netepi::parse_rate(json::parse(R"({"kind":"quotient","num":3,"den":{"kind":"constant","value":2}})"))(0.0), 1.5);
  EXPECT_THROW(netepi::parse_rate(json::parse(R"({"kind":"cubic"})")), config_error);
  EXPECT_THROW(netepi::parse_rate(json::parse(R"({"kind":"sin","base":1,"amplitude":2,"period":1})")), config_error);
  EXPECT_THROW(netepi::parse_rate(json::parse(R"({"kind":"ramp","from":"x","to":1,"t0":0,"t1":1})")), config_error);
}
