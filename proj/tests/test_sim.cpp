#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "netepi/sim.hpp"
#include "netepi/stats.hpp"
#include "support/properties.hpp"

using namespace netepi;

namespace {
const RateFunction kOne = RateFunction::constant(1.0);
}

TEST(Simulate, NoEdgesNoInfections) {
  const auto g = SparseGraph::from_edges(50, {});
  const auto tr = simulate(g, EpidemicParams::sir(RateFunction::constant(5.0), kOne, 0.5), 100.0, 1.0, 3);
  for (const Event& ev : tr.events) EXPECT_EQ(ev.from, State::I);
  ASSERT_TRUE(tr.extinction_time.has_value());
  EXPECT_DOUBLE_EQ(tr.final_outbreak(), 1.0 - tr.fractions.front().s);
  EXPECT_EQ(tr.fractions.front().s, tr.fractions.back().s);
}

TEST(Simulate, IsolatedRecoveryMean) {
  const auto times = props::isolated_recovery_times(kOne, 10000, 17);
  const double mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
  EXPECT_NEAR(mean, 1.0, 0.03);
}

TEST(Simulate, RejectsBadArguments) {
  const auto g = erdos_renyi(10, 2.0, 1);
  const auto p = EpidemicParams::sir(kOne, kOne, 0.9);
  EXPECT_THROW(simulate(g, p, 0.0, 0.1, 1), config_error);
  EXPECT_THROW(simulate(g, p, 1.0, 0.0, 1), config_error);
  EXPECT_THROW(simulate(g, p, std::vector<State>(3, State::S), 1.0, 0.1, 1), config_error);
  EXPECT_THROW(EpidemicParams::sir(kOne, kOne, 1.0), config_error);
  EXPECT_THROW(EpidemicParams::seir(kOne, kOne, kOne, 0.5, 0.2, 0.2), config_error);
}

TEST(Trajectory, FractionsAtReplaysEvents) {
  Trajectory tr;
  tr.initial = {State::I, State::S, State::S, State::S};
  tr.events = {{0.5, 1, State::S, State::I}, {1.0, 0, State::I, State::R}, {2.0, 1, State::I, State::R}};
  tr.horizon = 3.0;
  tr.extinction_time = 2.0;
  const auto at0 = tr.fractions_at(0.0);
  EXPECT_DOUBLE_EQ(at0.s, 0.75);
  EXPECT_DOUBLE_EQ(at0.i, 0.25);
  const auto at1 = tr.fractions_at(1.0);
  EXPECT_DOUBLE_EQ(at1.s, 0.5);
  EXPECT_DOUBLE_EQ(at1.i, 0.25);
  EXPECT_DOUBLE_EQ(at1.r, 0.25);
  EXPECT_DOUBLE_EQ(tr.final_outbreak(), 0.5);
  EXPECT_THROW(tr.fractions_at(3.5), config_error);
  EXPECT_THROW(tr.fractions_at(-0.1), config_error);
}

TEST(Trajectory, FinalOutbreakNeedsExtinction) {
  Trajectory tr;
  tr.initial = {State::I};
  tr.horizon = 1.0;
  EXPECT_THROW(tr.final_outbreak(), numerical_error);
}

TEST(Trajectory, GridMatchesReplay) {
  const auto g = erdos_renyi(200, 3.0, 5);
  const auto p = EpidemicParams::sir(kOne, kOne, 0.9);
  const auto tr = simulate(g, p, 8.0, 0.5, 21);
  ASSERT_EQ(tr.grid.size(), 17u);
  for (std::size_t k = 0; k < tr.grid.size(); ++k) {
    const auto f = tr.fractions_at(tr.grid[k]);
    EXPECT_DOUBLE_EQ(f.s, tr.fractions[k].s);
    EXPECT_DOUBLE_EQ(f.i, tr.fractions[k].i);
  }
}

TEST(Trajectory, SameSeedSameRun) {
  const auto g = erdos_renyi(300, 3.0, 5);
  const auto p = EpidemicParams::sir(RateFunction::sinusoid(1.0, 0.5, 2.0), kOne, 0.9);
  const auto a = simulate(g, p, 10.0, 0.1, 77);
  const auto b = simulate(g, p, 10.0, 0.1, 77);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    EXPECT_EQ(a.events[k].time, b.events[k].time);
    EXPECT_EQ(a.events[k].vertex, b.events[k].vertex);
  }
}

TEST(Trajectory, SeirHasNoDirectInfection) {
  const auto g = erdos_renyi(300, 4.0, 8);
  const auto p = EpidemicParams::seir(kOne, kOne, RateFunction::constant(0.5), 0.95, 0.05, 0.0);
  const auto tr = simulate(g, p, 30.0, 0.5, 4);
  bool exposed = false;
  for (const Event& ev : tr.events) {
    if (ev.from == State::S) {
      EXPECT_EQ(ev.to, State::E);
    }
    exposed = exposed || ev.from == State::S;
  }
  EXPECT_TRUE(exposed);
  EXPECT_EQ(check_trajectory(g, p, tr), "");
}

TEST(Csv, Headers) {
  const auto g = erdos_renyi(20, 2.0, 1);
  const auto tr = simulate(g, EpidemicParams::sir(kOne, kOne, 0.8), 2.0, 1.0, 1);
  std::ostringstream traj, events;
  write_trajectory_csv(traj, tr);
  write_events_csv(events, tr);
  EXPECT_EQ(traj.str().substr(0, 10), "t,s,e,i,r\n");
  EXPECT_EQ(events.str().substr(0, 19), "time,vertex,from,to");
}

TEST(SimProperties, Invariants) { EXPECT_EQ(props::sim_invariants(), props::Violations{}); }
TEST(SimProperties, ThinningMatchesHazard) { EXPECT_EQ(props::thinning_ks(), props::Violations{}); }
