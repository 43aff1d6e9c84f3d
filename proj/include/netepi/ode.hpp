#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "netepi/csv.hpp"
#include "netepi/dist.hpp"
#include "netepi/error.hpp"
#include "netepi/rates.hpp"
#include "netepi/rk.hpp"

namespace netepi {

enum class LimitModel { sir, seir };

struct LimitOptions {
  /// Absolute and relative local error target of the RK integrator.
  double rk_tol = 1e-9;
  double max_step = 0.05;
  /// > 0: report on the fixed grid k * output_step; 0: every accepted step.
  double output_step = 0.0;
  /// > 0: stop once the infectious neighbor mass (f_I, or g_E + g_I) drops
  /// below this value and freeze the pressure there.
  double extinction_eps = 0.0;
};

/// Gridded solution of the limit system for the root of the tree.
///
/// `nbr_*` hold the neighbor-state probabilities conditioned on a
/// susceptible root (f_S, f_I for SIR; g_S, g_E, g_I for SEIR) and
/// `pressure` the cumulative infection pressure int_0^t beta f_I. The
/// `root_*` curves are the large-population state fractions.
struct LimitSolution {
  LimitModel model = LimitModel::sir;
  DegreeDistribution theta = DegreeDistribution::point_mass(1);
  DegreeDistribution theta_hat = DegreeDistribution::point_mass(0);
  RateFunction beta = RateFunction::constant(1.0);
  RateFunction rho = RateFunction::constant(1.0);
  std::optional<RateFunction> lambda;
  double s0 = 0.0, e0 = 0.0, i0 = 0.0;
  double rk_tol = 1e-9;

  std::vector<double> t;
  std::vector<double> nbr_s, nbr_e, nbr_i;
  std::vector<double> pressure;
  std::vector<double> root_s, root_e, root_i;
  std::vector<double> rho_integral, lambda_integral;
  /// int_0^t exp(-pressure(u)) rho_u nbr_i(u) du
  std::vector<double> recovery_integral;
  bool extinct = false;

  std::size_t size() const noexcept { return t.size(); }
  double horizon() const { return t.back(); }
};

namespace detail {

/// Phi, M_theta and M'_theta at one pressure value, memoised for the
/// repeated arguments the FSAL stages produce.
class PressureTerms {
 public:
  PressureTerms(const DegreeDistribution& theta, const DegreeDistribution& theta_hat)
      : theta_(&theta), theta_hat_(&theta_hat) {}

  void at(double z, double& phi, double& m_prime) {
    z = std::max(z, 0.0);
    if (z != last_z_) {
      last_z_ = z;
      phi_ = theta_hat_->phi(z);
      m_prime_ = theta_->laplace_derivative(-z);
    }
    phi = phi_;
    m_prime = m_prime_;
  }

 private:
  const DegreeDistribution* theta_;
  const DegreeDistribution* theta_hat_;
  double last_z_ = std::numeric_limits<double>::quiet_NaN();
  double phi_ = 0.0, m_prime_ = 0.0;
};

// SIR state: f_S, f_I, F, int rho, root_i, recovery integral
enum SirSlot : std::size_t { kFS, kFI, kF, kRho, kRootI, kRec, kSirBase };

// SEIR state: g_S, g_E, g_I, G, int rho, int lambda, root_e, root_i, recovery
// integral, then optional conditional root marginals.
enum SeirSlot : std::size_t { kGS, kGE, kGI, kG, kRhoS, kLam, kRootE, kRootI2, kRec2, kSeirBase };

struct SeirSystem {
  const LimitSolution* sol;
  std::vector<std::size_t> ks;  // degrees whose Q_{S,*;k} are tracked (may be empty)
  mutable PressureTerms terms;

  void operator()(double t, std::span<const double> y, std::span<double> dy) const {
    const double b = sol->beta.evaluate(t);
    const double r = sol->rho.evaluate(t);
    const double l = sol->lambda->evaluate(t);
    double phi = 0.0, mp = 0.0;
    terms.at(y[kG], phi, mp);
    const double gs = y[kGS], ge = y[kGE], gi = y[kGI];
    dy[kGS] = b * gs * gi * (1.0 - phi);
    dy[kGE] = b * gs * gi * phi - ge * (l - b * gi);
    dy[kGI] = l * ge - gi * (r + b - b * gi);
    dy[kG] = b * gi;
    dy[kRhoS] = r;
    dy[kLam] = l;
    dy[kRootE] = sol->s0 * mp * b * gi - l * y[kRootE];
    dy[kRootI2] = l * y[kRootE] - r * y[kRootI2];
    dy[kRec2] = std::exp(-std::max(y[kG], 0.0)) * r * gi;
    if (ks.empty() && y.size() == kSeirBase) return;
    // conditional marginals: three per tracked degree, then Q_EE, Q_EI, Q_II
    std::size_t j = kSeirBase;
    for (std::size_t k : ks) {
      const double kd = static_cast<double>(k);
      dy[j] = -b * kd * gi * y[j];
      dy[j + 1] = b * kd * gi * y[j] - l * y[j + 1];
      dy[j + 2] = l * y[j + 1] - r * y[j + 2];
      j += 3;
    }
    dy[j] = -l * y[j];
    dy[j + 1] = l * y[j] - r * y[j + 1];
    dy[j + 2] = -r * y[j + 2];
  }
};

inline RkOptions rk_options(const LimitOptions& opts) {
  if (!(opts.rk_tol > 0.0)) throw config_error("rk_tol must be > 0");
  if (!(opts.max_step > 0.0)) throw config_error("max_step must be > 0");
  RkOptions rk;
  rk.rtol = opts.rk_tol;
  rk.atol = opts.rk_tol;
  rk.max_step = opts.max_step;
  rk.initial_step = std::min(1e-3, opts.max_step);
  return rk;
}

/// Drives `stepper` to t_max, calling record() on every reported point and
/// stopping early when done() holds after an accepted step.
template <class Record, class Done>
void drive(DormandPrince& stepper, double t_max, const LimitOptions& opts, Record&& record, Done&& done) {
  record();
  if (done()) return;
  if (opts.output_step > 0.0) {
    const auto count = static_cast<std::size_t>(std::floor(t_max / opts.output_step + 1e-9));
    for (std::size_t k = 1; k <= count + 1; ++k) {
      const double target = std::min(static_cast<double>(k) * opts.output_step, t_max);
      if (target <= stepper.time()) break;
      while (stepper.time() < target) {
        stepper.step(target);
        if (done()) {
          record();
          return;
        }
      }
      record();
    }
  } else {
    while (stepper.time() < t_max) {
      stepper.step(t_max);
      record();
      if (done()) return;
    }
  }
}

inline void check_initial(double s0, double e0, double i0) {
  if (!(s0 > 0.0 && s0 < 1.0)) throw config_error("s0 must lie in (0,1)");
  if (!(e0 >= 0.0) || !(i0 >= 0.0)) throw config_error("e0, i0 must be >= 0");
  if (std::abs(s0 + e0 + i0 - 1.0) > 1e-12) throw config_error("s0 + e0 + i0 must equal 1");
}

}  // namespace detail

/// Integrates the SIR limit system for (f_S, f_I, F_I) from
/// (s0, 1 - s0, 0) and derives the root fractions s(t) = s0 M(-F_I(t)) and
/// i(t). Auxiliary integrals are carried as extra ODE components.
inline LimitSolution solve_sir_limit(const DegreeDistribution& theta, const RateFunction& beta,
                                     const RateFunction& rho, double s0, double t_max,
                                     const LimitOptions& opts = {}) {
  detail::check_initial(s0, 0.0, 1.0 - s0);
  if (!(t_max >= 0.0)) throw config_error("t_max must be >= 0");
  LimitSolution sol;
  sol.model = LimitModel::sir;
  sol.theta = theta;
  sol.theta_hat = theta.size_biased();
  sol.beta = beta;
  sol.rho = rho;
  sol.s0 = s0;
  sol.i0 = 1.0 - s0;
  sol.rk_tol = opts.rk_tol;

  using namespace detail;
  PressureTerms terms(sol.theta, sol.theta_hat);
  auto rhs = [&sol, &terms](double t, std::span<const double> y, std::span<double> dy) {
    const double b = sol.beta.evaluate(t);
    const double r = sol.rho.evaluate(t);
    double phi = 0.0, mp = 0.0;
    terms.at(y[kF], phi, mp);
    const double fs = y[kFS], fi = y[kFI];
    dy[kFS] = fs * fi * b * (1.0 - phi);
    dy[kFI] = fs * fi * b * phi - fi * (r + b - b * fi);
    dy[kF] = b * fi;
    dy[kRho] = r;
    dy[kRootI] = sol.s0 * mp * b * fi - r * y[kRootI];
    dy[kRec] = std::exp(-std::max(y[kF], 0.0)) * r * fi;
  };

  std::vector<double> y0(kSirBase, 0.0);
  y0[kFS] = s0;
  y0[kFI] = 1.0 - s0;
  y0[kRootI] = 1.0 - s0;
  DormandPrince stepper(rhs, y0, 0.0, rk_options(opts));

  const auto record = [&] {
    const auto y = stepper.state();
    sol.t.push_back(stepper.time());
    sol.nbr_s.push_back(y[kFS]);
    sol.nbr_e.push_back(0.0);
    sol.nbr_i.push_back(y[kFI]);
    sol.pressure.push_back(y[kF]);
    sol.root_s.push_back(s0 * sol.theta.laplace(-std::max(y[kF], 0.0)));
    sol.root_e.push_back(0.0);
    sol.root_i.push_back(y[kRootI]);
    sol.rho_integral.push_back(y[kRho]);
    sol.lambda_integral.push_back(0.0);
    sol.recovery_integral.push_back(y[kRec]);
  };
  const auto done = [&] {
    if (opts.extinction_eps > 0.0 && stepper.state()[kFI] < opts.extinction_eps) sol.extinct = true;
    return sol.extinct;
  };
  drive(stepper, t_max, opts, record, done);
  return sol;
}

/// Integrates the SEIR limit system for (g_S, g_E, g_I, G_I) from
/// (s0, e0, i0, 0) and derives the root fractions s_bar, e_bar, i_bar.
inline LimitSolution solve_seir_limit(const DegreeDistribution& theta, const RateFunction& beta,
                                      const RateFunction& rho, const RateFunction& lambda, double s0, double e0,
                                      double i0, double t_max, const LimitOptions& opts = {}) {
  detail::check_initial(s0, e0, i0);
  if (!(t_max >= 0.0)) throw config_error("t_max must be >= 0");
  LimitSolution sol;
  sol.model = LimitModel::seir;
  sol.theta = theta;
  sol.theta_hat = theta.size_biased();
  sol.beta = beta;
  sol.rho = rho;
  sol.lambda = lambda;
  sol.s0 = s0;
  sol.e0 = e0;
  sol.i0 = i0;
  sol.rk_tol = opts.rk_tol;

  using namespace detail;
  SeirSystem system{&sol, {}, PressureTerms(sol.theta, sol.theta_hat)};
  std::vector<double> y0(kSeirBase, 0.0);
  y0[kGS] = s0;
  y0[kGE] = e0;
  y0[kGI] = i0;
  y0[kRootE] = e0;
  y0[kRootI2] = i0;
  DormandPrince stepper(std::ref(system), y0, 0.0, rk_options(opts));

  const auto record = [&] {
    const auto y = stepper.state();
    sol.t.push_back(stepper.time());
    sol.nbr_s.push_back(y[kGS]);
    sol.nbr_e.push_back(y[kGE]);
    sol.nbr_i.push_back(y[kGI]);
    sol.pressure.push_back(y[kG]);
    sol.root_s.push_back(s0 * sol.theta.laplace(-std::max(y[kG], 0.0)));
    sol.root_e.push_back(y[kRootE]);
    sol.root_i.push_back(y[kRootI2]);
    sol.rho_integral.push_back(y[kRhoS]);
    sol.lambda_integral.push_back(y[kLam]);
    sol.recovery_integral.push_back(y[kRec2]);
  };
  const auto done = [&] {
    const auto y = stepper.state();
    if (opts.extinction_eps > 0.0 && y[kGE] + y[kGI] < opts.extinction_eps) sol.extinct = true;
    return sol.extinct;
  };
  drive(stepper, t_max, opts, record, done);
  return sol;
}

/// Root marginals conditioned on the initial state and root degree k:
/// pss[j][n] = P_{S,S;k_j}(t_n) and so on.
struct SirMarginals {
  std::vector<double> t;
  std::vector<std::size_t> ks;
  std::vector<std::vector<double>> pss, psi;
  std::vector<double> pii;
};

/// P_{S,S;k} = exp(-k F_I), P_{I,I} = exp(-int rho); P_{S,I;k} by trapezoid
/// quadrature of its closed form on the solution grid.
inline SirMarginals sir_marginals(const LimitSolution& sol, std::span<const std::size_t> ks) {
  if (sol.model != LimitModel::sir) throw config_error("sir_marginals needs an SIR solution");
  SirMarginals m;
  m.t = sol.t;
  m.ks.assign(ks.begin(), ks.end());
  const std::size_t n = sol.size();
  m.pii.resize(n);
  for (std::size_t j = 0; j < n; ++j) m.pii[j] = std::exp(-sol.rho_integral[j]);

  for (std::size_t k : ks) {
    const double kd = static_cast<double>(k);
    std::vector<double> pss(n), psi(n);
    std::vector<double> forcing(n);
    for (std::size_t j = 0; j < n; ++j) {
      pss[j] = std::exp(-kd * sol.pressure[j]);
      forcing[j] = kd * pss[j] * sol.beta.evaluate(sol.t[j]) * sol.nbr_i[j];
    }
    psi[0] = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      // e^{-R(t)} int_0^t e^{R(u)} g(u) du, advanced one panel at a time
      const double decay = std::exp(-(sol.rho_integral[j + 1] - sol.rho_integral[j]));
      const double h = sol.t[j + 1] - sol.t[j];
      psi[j + 1] = decay * psi[j] + 0.5 * h * (decay * forcing[j] + forcing[j + 1]);
    }
    m.pss.push_back(std::move(pss));
    m.psi.push_back(std::move(psi));
  }
  return m;
}

struct SeirMarginals {
  std::vector<double> t;
  std::vector<std::size_t> ks;
  std::vector<std::vector<double>> qss, qse, qsi;
  std::vector<double> qee, qei, qii;
};

/// Integrates the linear conditional-marginal system jointly with the SEIR
/// limit system and reports it on the solution's grid.
inline SeirMarginals seir_marginals(const LimitSolution& sol, std::span<const std::size_t> ks) {
  if (sol.model != LimitModel::seir || !sol.lambda) throw config_error("seir_marginals needs an SEIR solution");
  using namespace detail;
  SeirSystem system{&sol, std::vector<std::size_t>(ks.begin(), ks.end()), PressureTerms(sol.theta, sol.theta_hat)};
  const std::size_t extra = 3 * ks.size() + 3;
  std::vector<double> y0(kSeirBase + extra, 0.0);
  y0[kGS] = sol.s0;
  y0[kGE] = sol.e0;
  y0[kGI] = sol.i0;
  y0[kRootE] = sol.e0;
  y0[kRootI2] = sol.i0;
  for (std::size_t j = 0; j < ks.size(); ++j) y0[kSeirBase + 3 * j] = 1.0;
  const std::size_t tail = kSeirBase + 3 * ks.size();
  y0[tail] = 1.0;      // Q_EE
  y0[tail + 2] = 1.0;  // Q_II

  LimitOptions lo;
  lo.rk_tol = sol.rk_tol;
  RkOptions rk = rk_options(lo);
  rk.max_step = std::numeric_limits<double>::infinity();
  DormandPrince stepper(std::ref(system), y0, sol.t.front(), rk);

  SeirMarginals m;
  m.t = sol.t;
  m.ks.assign(ks.begin(), ks.end());
  m.qss.assign(ks.size(), {});
  m.qse.assign(ks.size(), {});
  m.qsi.assign(ks.size(), {});
  for (double tj : sol.t) {
    stepper.advance_to(tj);
    const auto y = stepper.state();
    for (std::size_t j = 0; j < ks.size(); ++j) {
      m.qss[j].push_back(y[kSeirBase + 3 * j]);
      m.qse[j].push_back(y[kSeirBase + 3 * j + 1]);
      m.qsi[j].push_back(y[kSeirBase + 3 * j + 2]);
    }
    m.qee.push_back(y[tail]);
    m.qei.push_back(y[tail + 1]);
    m.qii.push_back(y[tail + 2]);
  }
  return m;
}

/// P_{S,S}(t) on the 2-regular tree with constant infection rate b and
/// recovery rate r.
inline double line_graph_pss(double t, double s0, double b, double r) {
  const double q = r / b;
  const double v = ((1.0 - s0) * std::exp(-t * (b * (1.0 - s0) + r)) + q) / (1.0 - s0 + q);
  return v * v;
}

/// t -> infinity limit of line_graph_pss.
inline double line_graph_pss_limit(double s0, double b, double r) {
  const double v = 1.0 / (1.0 + (1.0 - s0) * b / r);
  return v * v;
}

/// CSV "t,f_S,f_I,F_I,s_inf,i_inf" (SIR) or
/// "t,g_S,g_E,g_I,G_I,s_bar,e_bar,i_bar" (SEIR).
inline void write_limit_csv(std::ostream& os, const LimitSolution& sol) {
  if (sol.model == LimitModel::sir) {
    os << "t,f_S,f_I,F_I,s_inf,i_inf\n";
    for (std::size_t j = 0; j < sol.size(); ++j)
      csv_row(os, sol.t[j], sol.nbr_s[j], sol.nbr_i[j], sol.pressure[j], sol.root_s[j], sol.root_i[j]);
  } else {
    os << "t,g_S,g_E,g_I,G_I,s_bar,e_bar,i_bar\n";
    for (std::size_t j = 0; j < sol.size(); ++j)
      csv_row(os, sol.t[j], sol.nbr_s[j], sol.nbr_e[j], sol.nbr_i[j], sol.pressure[j], sol.root_s[j],
              sol.root_e[j], sol.root_i[j]);
  }
}

}  // namespace netepi
