#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "netepi/csv.hpp"
#include "netepi/error.hpp"
#include "netepi/graphs.hpp"
#include "netepi/rates.hpp"
#include "netepi/rng.hpp"

namespace netepi {

/// Compartments, ordered S < E < I < R; a vertex only ever moves up.
enum class State : std::uint8_t { S = 0, E = 1, I = 2, R = 3 };

inline char state_letter(State s) { return "SEIR"[static_cast<int>(s)]; }

/// Parameters of the hybrid S(E)IR chain. alpha = 0 is SIR, alpha = 1 SEIR.
struct EpidemicParams {
  double alpha = 0.0;
  RateFunction beta = RateFunction::constant(1.0);
  RateFunction rho = RateFunction::constant(1.0);
  RateFunction lambda = RateFunction::constant(1.0);
  double s0 = 0.9;
  double e0 = 0.0;
  double i0 = 0.1;

  static EpidemicParams sir(RateFunction beta, RateFunction rho, double s0) {
    EpidemicParams p{0.0, std::move(beta), std::move(rho), RateFunction::constant(1.0), s0, 0.0, 1.0 - s0};
    p.validate();
    return p;
  }

  static EpidemicParams seir(RateFunction beta, RateFunction rho, RateFunction lambda, double s0, double e0,
                             double i0) {
    EpidemicParams p{1.0, std::move(beta), std::move(rho), std::move(lambda), s0, e0, i0};
    p.validate();
    return p;
  }

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw config_error("alpha must lie in [0,1]");
    if (!(s0 > 0.0 && s0 < 1.0)) throw config_error("s0 must lie in (0,1)");
    if (!(e0 >= 0.0 && e0 <= 1.0) || !(i0 >= 0.0 && i0 <= 1.0)) throw config_error("e0, i0 must lie in [0,1]");
    if (std::abs(s0 + e0 + i0 - 1.0) > 1e-12) throw config_error("s0 + e0 + i0 must equal 1");
    if (alpha == 0.0 && e0 != 0.0) throw config_error("SIR dynamics (alpha = 0) require e0 = 0");
  }
};

struct Event {
  double time;
  Vertex vertex;
  State from;
  State to;
};

struct Fractions {
  double s = 0.0, e = 0.0, i = 0.0, r = 0.0;

  double get(State st) const {
    switch (st) {
      case State::S: return s;
      case State::E: return e;
      case State::I: return i;
      case State::R: return r;
    }
    return 0.0;
  }
};

/// One stochastic run: initial states, chronological event log and
/// state fractions sampled on a regular grid up to the horizon.
class Trajectory {
 public:
  std::vector<State> initial;
  std::vector<Event> events;
  std::vector<double> grid;
  std::vector<Fractions> fractions;
  std::optional<double> extinction_time;
  double horizon = 0.0;

  std::size_t size() const noexcept { return initial.size(); }

  /// Exact fractions at time t, replaying events with time <= t.
  Fractions fractions_at(double t) const {
    if (t < 0.0 || t > horizon) throw config_error("time outside the trajectory horizon");
    std::array<std::size_t, 4> counts{};
    for (State s : initial) ++counts[static_cast<int>(s)];
    for (const Event& ev : events) {
      if (ev.time > t) break;
      --counts[static_cast<int>(ev.from)];
      ++counts[static_cast<int>(ev.to)];
    }
    return to_fractions(counts, size());
  }

  /// 1 - susceptible fraction at extinction.
  double final_outbreak() const {
    if (!extinction_time) throw numerical_error("trajectory did not reach extinction; raise t_max");
    return 1.0 - fractions_at(*extinction_time).s;
  }

  static Fractions to_fractions(const std::array<std::size_t, 4>& counts, std::size_t n) {
    const double inv = 1.0 / static_cast<double>(n);
    return {static_cast<double>(counts[0]) * inv, static_cast<double>(counts[1]) * inv, static_cast<double>(counts[2]) * inv,
            static_cast<double>(counts[3]) * inv};
  }
};

struct SimOptions {
  /// Lookahead window for the dominating Poisson proposals.
  double window = 1.0;
};

namespace detail {

struct Candidate {
  double time;
  Vertex vertex;
  std::uint32_t version;
};

struct CandidateLater {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.vertex > b.vertex;
  }
};

/// First point after `t` of an inhomogeneous Poisson process with intensity
/// multiplier * rate(.), by thinning a homogeneous proposal whose intensity
/// dominates on each lookahead window. Returns +inf past `t_stop`.
inline double next_thinned(const RateFunction& rate, double multiplier, double t, double t_stop, double window,
                           Rng& rng) {
  constexpr double never = std::numeric_limits<double>::infinity();
  while (t < t_stop) {
    const double t_end = t + window;
    const double dominating = multiplier * rate.upper_bound(t, t_end);
    const double dt = rng.exponential(dominating);
    if (t + dt > t_end) {
      t = t_end;
      continue;
    }
    t += dt;
    if (t > t_stop) break;
    if (rng.uniform() * dominating <= multiplier * rate.evaluate(t)) return t;
  }
  return never;
}

}  // namespace detail

/// Event-driven simulation from explicit initial states.
inline Trajectory simulate(const SparseGraph& g, const EpidemicParams& p, std::vector<State> initial, double t_max,
                           double grid_step, std::uint64_t seed, const SimOptions& opts = {}) {
  p.validate();
  if (!(t_max > 0.0)) throw config_error("t_max must be > 0");
  if (!(grid_step > 0.0)) throw config_error("grid_step must be > 0");
  if (!(opts.window > 0.0)) throw config_error("thinning window must be > 0");
  if (initial.size() != g.size()) throw config_error("initial state vector does not match graph size");

  const std::size_t n = g.size();
  Rng rng(seed);
  Trajectory tr;
  tr.horizon = t_max;
  tr.initial = initial;
  std::vector<State> state = std::move(initial);

  std::array<std::size_t, 4> counts{};
  for (State s : state) ++counts[static_cast<int>(s)];

  // infected-neighbor counts drive the S -> E/I intensity
  std::vector<std::uint32_t> infected_nbrs(n, 0);
  for (Vertex v = 0; v < n; ++v)
    if (state[v] == State::I)
      for (Vertex w : g.neighbors(v)) ++infected_nbrs[w];

  std::vector<std::uint32_t> version(n, 0);
  std::priority_queue<detail::Candidate, std::vector<detail::Candidate>, detail::CandidateLater> queue;

  const auto schedule = [&](Vertex v, double now) {
    ++version[v];
    double when = std::numeric_limits<double>::infinity();
    switch (state[v]) {
      case State::S:
        if (infected_nbrs[v] > 0)
          when = detail::next_thinned(p.beta, infected_nbrs[v], now, t_max, opts.window, rng);
        break;
      case State::E:
        when = detail::next_thinned(p.lambda, 1.0, now, t_max, opts.window, rng);
        break;
      case State::I:
        when = detail::next_thinned(p.rho, 1.0, now, t_max, opts.window, rng);
        break;
      case State::R:
        break;
    }
    if (std::isfinite(when)) queue.push({when, v, version[v]});
  };

  for (Vertex v = 0; v < n; ++v) schedule(v, 0.0);

  const auto grid_count = static_cast<std::size_t>(std::floor(t_max / grid_step + 1e-9)) + 1;
  tr.grid.reserve(grid_count);
  tr.fractions.reserve(grid_count);
  std::size_t next_grid = 0;
  const auto emit_grid_before = [&](double t) {
    while (next_grid < grid_count) {
      const double tg = std::min(static_cast<double>(next_grid) * grid_step, t_max);
      if (tg >= t) break;
      tr.grid.push_back(tg);
      tr.fractions.push_back(Trajectory::to_fractions(counts, n));
      ++next_grid;
    }
  };

  const auto active = [&] { return counts[1] + counts[2]; };
  if (active() == 0) tr.extinction_time = 0.0;

  const auto move = [&](Vertex v, State to, double now) {
    const State from = state[v];
    tr.events.push_back({now, v, from, to});
    --counts[static_cast<int>(from)];
    ++counts[static_cast<int>(to)];
    state[v] = to;
    if (to == State::I) {
      for (Vertex w : g.neighbors(v)) {
        ++infected_nbrs[w];
        if (state[w] == State::S) schedule(w, now);
      }
    } else if (from == State::I) {
      for (Vertex w : g.neighbors(v)) {
        --infected_nbrs[w];
        if (state[w] == State::S) schedule(w, now);
      }
    }
    schedule(v, now);
  };

  while (!queue.empty() && active() > 0) {
    const detail::Candidate c = queue.top();
    queue.pop();
    if (c.version != version[c.vertex]) continue;
    if (c.time > t_max) break;
    emit_grid_before(c.time);
    switch (state[c.vertex]) {
      case State::S:
        move(c.vertex, rng.uniform() < p.alpha ? State::E : State::I, c.time);
        break;
      case State::E:
        move(c.vertex, State::I, c.time);
        break;
      case State::I:
        move(c.vertex, State::R, c.time);
        break;
      case State::R:
        break;
    }
    if (active() == 0) tr.extinction_time = c.time;
  }
  emit_grid_before(std::numeric_limits<double>::infinity());
  return tr;
}

/// Event-driven simulation with i.i.d. initial states drawn from (s0, e0, i0).
inline Trajectory simulate(const SparseGraph& g, const EpidemicParams& p, double t_max, double grid_step,
                           std::uint64_t seed, const SimOptions& opts = {}) {
  p.validate();
  Rng init_rng(split_seed(seed, 0));
  std::vector<State> initial(g.size());
  for (auto& s : initial) {
    const double u = init_rng.uniform();
    s = u < p.s0 ? State::S : (u < p.s0 + p.e0 ? State::E : State::I);
  }
  return simulate(g, p, std::move(initial), t_max, grid_step, split_seed(seed, 1), opts);
}

/// Checks the structural invariants of a run; returns a description of the
/// first violation, or an empty string.
inline std::string check_trajectory(const SparseGraph& g, const EpidemicParams& p, const Trajectory& tr) {
  if (tr.initial.size() != g.size()) return "initial state size mismatch";
  std::vector<State> state = tr.initial;
  std::vector<int> moves(g.size(), 0);
  double last = 0.0;
  for (const Event& ev : tr.events) {
    if (ev.time < last) return "events out of order";
    last = ev.time;
    if (ev.vertex >= g.size()) return "event vertex out of range";
    if (state[ev.vertex] != ev.from) return "event source state does not match replay";
    if (static_cast<int>(ev.to) <= static_cast<int>(ev.from)) return "non-monotone transition";
    if (++moves[ev.vertex] > 3) return "more than three events for one vertex";
    if (ev.from == State::S) {
      if (p.alpha == 0.0 && ev.to == State::E) return "exposed state under SIR dynamics";
      if (p.alpha == 1.0 && ev.to == State::I) return "direct S->I under SEIR dynamics";
      if (ev.to == State::R) return "S->R jump";
      const auto nb = g.neighbors(ev.vertex);
      const bool pressure = std::any_of(nb.begin(), nb.end(), [&](Vertex w) { return state[w] == State::I; });
      if (!pressure) return "infection without an infected neighbor";
    } else if (ev.from == State::E && ev.to != State::I) {
      return "E must move to I";
    } else if (ev.from == State::I && ev.to != State::R) {
      return "I must move to R";
    }
    state[ev.vertex] = ev.to;
  }
  for (const Fractions& f : tr.fractions) {
    if (std::abs(f.s + f.e + f.i + f.r - 1.0) > 1e-12) return "fractions do not sum to one";
  }
  for (std::size_t k = 1; k < tr.fractions.size(); ++k) {
    if (tr.fractions[k].s > tr.fractions[k - 1].s) return "susceptible fraction increased";
    if (tr.fractions[k].r < tr.fractions[k - 1].r) return "recovered fraction decreased";
  }
  return {};
}

/// CSV "t,s,e,i,r" at grid times.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,s,e,i,r\n";
  for (std::size_t k = 0; k < tr.grid.size(); ++k) {
    const Fractions& f = tr.fractions[k];
    csv_row(os, tr.grid[k], f.s, f.e, f.i, f.r);
  }
}

/// CSV "time,vertex,from,to".
inline void write_events_csv(std::ostream& os, const Trajectory& tr) {
  os << "time,vertex,from,to\n";
  for (const Event& ev : tr.events)
    csv_row(os, ev.time, ev.vertex, std::string(1, state_letter(ev.from)), std::string(1, state_letter(ev.to)));
}

}  // namespace netepi
