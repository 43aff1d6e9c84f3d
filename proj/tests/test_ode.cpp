#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "netepi/ode.hpp"
#include "support/properties.hpp"

using namespace netepi;

namespace {
const RateFunction kOne = RateFunction::constant(1.0);

LimitOptions grid(double step) {
  LimitOptions lo;
  lo.output_step = step;
  return lo;
}
}  // namespace

TEST(SirLimit, TwoRegularKeepsNeighborSusceptibleFixed) {
  const auto sol = solve_sir_limit(DegreeDistribution::point_mass(2), kOne, kOne, 0.9, 10.0, grid(0.5));
  for (double f : sol.nbr_s) EXPECT_NEAR(f, 0.9, 1e-14);
}

TEST(SirLimit, ZeroHorizonReturnsInitialState) {
  const auto sol = solve_sir_limit(DegreeDistribution::poisson(2.0), kOne, kOne, 0.9, 0.0);
  ASSERT_EQ(sol.size(), 1u);
  EXPECT_EQ(sol.t[0], 0.0);
  EXPECT_EQ(sol.nbr_s[0], 0.9);
  EXPECT_NEAR(sol.nbr_i[0], 0.1, 1e-15);
  EXPECT_EQ(sol.pressure[0], 0.0);
  EXPECT_NEAR(sol.root_s[0], 0.9, 1e-15);
}

TEST(SirLimit, LongHorizonStaysFinite) {
  const auto sol = solve_sir_limit(DegreeDistribution::point_mass(3), kOne, kOne, 0.9, 50.0);
  EXPECT_TRUE(std::isfinite(sol.pressure.back()));
  EXPECT_GT(sol.pressure.back(), 0.0);
  EXPECT_LT(sol.nbr_i.back(), 1e-6);
}

TEST(SirLimit, RejectsBadInput) {
  const auto theta = DegreeDistribution::poisson(2.0);
  EXPECT_THROW(solve_sir_limit(theta, kOne, kOne, 1.0, 1.0), config_error);
  EXPECT_THROW(solve_sir_limit(theta, kOne, kOne, 0.9, -1.0), config_error);
  LimitOptions lo;
  lo.rk_tol = 0.0;
  EXPECT_THROW(solve_sir_limit(theta, kOne, kOne, 0.9, 1.0, lo), config_error);
}

TEST(SirLimit, MatchesLineGraphClosedForm) {
  for (double b : {0.5, 1.0, 3.0})
    for (double r : {0.5, 1.0, 2.0}) {
      const auto sol = solve_sir_limit(DegreeDistribution::point_mass(2), RateFunction::constant(b),
                                       RateFunction::constant(r), 0.9, 20.0, grid(0.1));
      double worst = 0.0;
      for (std::size_t j = 0; j < sol.size(); ++j)
        worst = std::max(worst, std::abs(sol.root_s[j] - 0.9 * line_graph_pss(sol.t[j], 0.9, b, r)));
      EXPECT_LT(worst, 1e-8) << "b=" << b << " r=" << r;
    }
}

TEST(SirLimit, PoissonFinalStateMatchesOracle) {
  // DOP853 oracle at rtol 1e-12, integrated to t = 200
  const auto sol = solve_sir_limit(DegreeDistribution::poisson(2.0), RateFunction::constant(0.5), kOne, 0.9, 200.0);
  EXPECT_NEAR(sol.pressure.back(), 0.078231880300, 1e-9);
  EXPECT_NEAR(sol.root_s.back(), 0.774249911140, 1e-9);
}

TEST(LineGraph, Examples) {
  EXPECT_NEAR(line_graph_pss_limit(0.9, 1.0, 1.0), 0.8264462809917354, 1e-15);
  EXPECT_NEAR(0.9 * line_graph_pss_limit(0.9, 1.0, 1.0), 0.743801652892562, 1e-14);
  EXPECT_NEAR(line_graph_pss(0.0, 0.9, 1.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(line_graph_pss(200.0, 0.9, 1.0, 1.0), line_graph_pss_limit(0.9, 1.0, 1.0), 1e-15);
}

TEST(SirMarginals, Examples) {
  const auto sol = solve_sir_limit(DegreeDistribution::poisson(2.0), kOne, kOne, 0.9, 4.0, grid(1.0));
  const std::vector<std::size_t> ks{0, 1, 3};
  const auto m = sir_marginals(sol, ks);
  ASSERT_EQ(sol.t[2], 2.0);
  EXPECT_NEAR(m.pii[2], 0.1353352832366127, 1e-9);
  for (std::size_t j = 0; j < sol.size(); ++j) {
    EXPECT_EQ(m.pss[0][j], 1.0);
    EXPECT_NEAR(m.pss[2][j], std::exp(-3.0 * sol.pressure[j]), 1e-15);
    EXPECT_EQ(m.psi[0][j], 0.0);
    EXPECT_GE(m.psi[2][j], 0.0);
    EXPECT_LE(m.pss[2][j] + m.psi[2][j], 1.0 + 1e-12);
  }
  EXPECT_THROW(seir_marginals(sol, ks), config_error);
}

TEST(SeirLimit, InitialValues) {
  const auto sol = solve_seir_limit(DegreeDistribution::poisson(3.0), kOne, kOne, kOne, 0.97, 0.02, 0.01, 1.0);
  EXPECT_EQ(sol.nbr_s[0], 0.97);
  EXPECT_EQ(sol.nbr_e[0], 0.02);
  EXPECT_EQ(sol.nbr_i[0], 0.01);
  EXPECT_EQ(sol.root_e[0], 0.02);
  EXPECT_EQ(sol.root_i[0], 0.01);
  EXPECT_EQ(sol.pressure[0], 0.0);
  EXPECT_THROW(solve_seir_limit(DegreeDistribution::poisson(3.0), kOne, kOne, kOne, 0.97, 0.02, 0.02, 1.0),
               config_error);
}

TEST(SeirLimit, FastIncubationApproachesSir) {
  const auto theta = DegreeDistribution::poisson(3.0);
  const auto sir = solve_sir_limit(theta, kOne, kOne, 0.95, 10.0, grid(0.5));
  const auto seir = solve_seir_limit(theta, kOne, kOne, RateFunction::constant(1000.0), 0.95, 0.0, 0.05, 10.0, grid(0.5));
  ASSERT_EQ(sir.size(), seir.size());
  for (std::size_t j = 0; j < sir.size(); ++j) {
    EXPECT_NEAR(sir.root_s[j], seir.root_s[j], 0.02);
    EXPECT_NEAR(sir.root_i[j], seir.root_i[j] + seir.root_e[j], 0.02);
  }
}

TEST(SeirLimit, FinalSusceptibleIndependentOfIncubationRate) {
  // 3-regular with beta = rho is near-critical, so s_bar relaxes slowly: the
  // curves still differ by ~0.04 at t = 50 and coincide once both are spent.
  const auto theta = DegreeDistribution::point_mass(3);
  const auto at = [&](double lambda, double t) {
    return solve_seir_limit(theta, kOne, kOne, RateFunction::constant(lambda), 0.99, 0.0, 0.01, t).root_s.back();
  };
  EXPECT_GT(std::abs(at(0.5, 50.0) - at(2.0, 50.0)), 0.01);
  EXPECT_NEAR(at(0.5, 400.0), at(2.0, 400.0), 1e-4);
  EXPECT_NEAR(at(2.0, 400.0), 0.743801652892562, 1e-6);  // sigma_3 at r = 1, s0 = 0.99
}

TEST(SeirMarginals, ExposedSurvivalAtUnitRate) {
  const auto sol = solve_seir_limit(DegreeDistribution::poisson(2.0), kOne, kOne, kOne, 0.9, 0.05, 0.05, 3.0, grid(0.5));
  const std::vector<std::size_t> ks{0, 2};
  const auto q = seir_marginals(sol, ks);
  for (std::size_t j = 0; j < sol.size(); ++j) {
    EXPECT_NEAR(q.qee[j], std::exp(-sol.t[j]), 1e-8);
    EXPECT_NEAR(q.qii[j], std::exp(-sol.t[j]), 1e-8);
    EXPECT_NEAR(q.qss[0][j], 1.0, 1e-12);
    EXPECT_GT(q.qss[1][j], 0.0);
    EXPECT_LE(q.qss[1][j], 1.0 + 1e-12);
  }
  EXPECT_THROW(sir_marginals(sol, ks), config_error);
}

TEST(LimitCsv, Header) {
  std::ostringstream os;
  write_limit_csv(os, solve_sir_limit(DegreeDistribution::point_mass(3), kOne, kOne, 0.9, 1.0, grid(0.5)));
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,f_S,f_I,F_I,s_inf,i_inf");
}

TEST(OdeProperties, SirStructure) { EXPECT_EQ(props::ode_sir_properties(), props::Violations{}); }
TEST(OdeProperties, SeirStructure) { EXPECT_EQ(props::ode_seir_properties(), props::Violations{}); }
TEST(OdeProperties, ToleranceRefinement) { EXPECT_EQ(props::ode_refinement(), props::Violations{}); }
