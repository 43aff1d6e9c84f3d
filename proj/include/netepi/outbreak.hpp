#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "netepi/csv.hpp"
#include "netepi/dist.hpp"
#include "netepi/error.hpp"
#include "netepi/ode.hpp"
#include "netepi/rates.hpp"
#include "netepi/roots.hpp"

namespace netepi {

enum class OutbreakMethod { constant_ratio_root, ode_horizon, regular_closed_form, mean_field };

inline std::string_view method_name(OutbreakMethod m) {
  switch (m) {
    case OutbreakMethod::constant_ratio_root: return "constant_ratio_root";
    case OutbreakMethod::ode_horizon: return "ode_horizon";
    case OutbreakMethod::regular_closed_form: return "regular";
    case OutbreakMethod::mean_field: return "mean_field";
  }
  return "?";
}

struct OutbreakResult {
  double F = 0.0;
  double s_final = 0.0;
  double outbreak = 0.0;
  OutbreakMethod method = OutbreakMethod::constant_ratio_root;
  double residual = 0.0;
  /// Time at which the limit ODE was declared extinct (ODE methods only).
  double horizon = 0.0;
};

/// z + log M_thetahat(-z) - log(1 + r(1 - e^z)) + log s0, and +inf once
/// the argument of the second logarithm is no longer positive.
inline double psi_r(double z, double r, double s0, const DegreeDistribution& theta_hat) {
  if (!(z >= 0.0)) throw config_error("psi_r needs z >= 0");
  const double arg = 1.0 + r * (1.0 - std::exp(z));
  if (!(arg > 0.0)) return std::numeric_limits<double>::infinity();
  return z + std::log(theta_hat.laplace(-z)) - std::log(arg) + std::log(s0);
}

inline double psi_r_derivative(double z, double r, const DegreeDistribution& theta_hat) {
  const double ez = std::exp(z);
  const double arg = 1.0 + r * (1.0 - ez);
  if (!(arg > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 - theta_hat.phi(z) + r * ez / arg;
}

namespace detail {

inline void check_ratio(double r, double s0) {
  if (!(r > 0.0) || !std::isfinite(r)) throw config_error("ratio r must be > 0");
  if (!(s0 > 0.0 && s0 < 1.0)) throw config_error("s0 must lie in (0,1)");
}

inline OutbreakResult finish(const DegreeDistribution& theta, double s0, double F, OutbreakMethod m, double residual) {
  OutbreakResult res;
  res.F = F;
  res.s_final = s0 * theta.laplace(-F);
  res.outbreak = 1.0 - res.s_final;
  res.method = m;
  res.residual = residual;
  return res;
}

}  // namespace detail

/// Final size under a constant ratio r = rho/beta: the unique positive root
/// of Psi_r, which lies below log(1 + 1/r).
inline OutbreakResult solve_constant_ratio(const DegreeDistribution& theta, double r, double s0) {
  detail::check_ratio(r, s0);
  const DegreeDistribution theta_hat = theta.size_biased();
  const auto psi = [&](double z) { return psi_r(z, r, s0, theta_hat); };
  const auto dpsi = [&](double z) { return psi_r_derivative(z, r, theta_hat); };

  const double width = std::log1p(1.0 / r);
  const double eps = 1e-12 * width;
  double lo = eps;
  double hi = width - eps;
  // pull non-finite endpoints inward geometrically
  for (double step = eps; !std::isfinite(psi(hi)) && step < 0.5 * width; step *= 4.0) hi = width - step;
  for (double step = eps; !std::isfinite(psi(lo)) && step < 0.5 * width; step *= 4.0) lo = step;
  if (!(psi(lo) < 0.0)) lo = 0.0;  // psi(0) = log s0 < 0

  const Bracket b = bisect(psi, lo, hi, 1e-13);
  const double z = newton_polish(psi, dpsi, 0.5 * (b.lo + b.hi), lo, hi, 3);
  return detail::finish(theta, s0, z, OutbreakMethod::constant_ratio_root, psi(z));
}

/// F + log M_thetahat(-F) - log(1 - e^F J) + log s0, with
/// J = int_0^inf exp(-F(u)) rho_u f_I(u) du.
inline double time_varying_residual(const DegreeDistribution& theta_hat, double F, double J, double s0) {
  const double arg = 1.0 - std::exp(F) * J;
  if (!(arg > 0.0)) return std::numeric_limits<double>::infinity();
  return F + std::log(theta_hat.laplace(-F)) - std::log(arg) + std::log(s0);
}

struct FinalSizeOptions {
  /// The limit ODE counts as extinct once the infectious neighbor mass is
  /// below this value.
  double extinction_eps = 1e-10;
  double horizon = 1e4;
  LimitOptions ode{};
};

namespace detail {

inline LimitOptions to_extinction(const FinalSizeOptions& opts) {
  if (!(opts.extinction_eps > 0.0)) throw config_error("extinction_eps must be > 0");
  LimitOptions lo = opts.ode;
  lo.extinction_eps = opts.extinction_eps;
  lo.output_step = 0.0;
  return lo;
}

inline OutbreakResult from_limit(const LimitSolution& sol, const FinalSizeOptions& opts) {
  if (!sol.extinct)
    throw numerical_error("limit ODE not extinct by horizon " + format_real(opts.horizon));
  const double F = sol.pressure.back();
  const double J = sol.recovery_integral.back();
  OutbreakResult res =
      finish(sol.theta, sol.s0, F, OutbreakMethod::ode_horizon, time_varying_residual(sol.theta_hat, F, J, sol.s0));
  res.horizon = sol.horizon();
  return res;
}

}  // namespace detail

/// Runs the SIR limit system to extinction and reads F off the horizon.
inline LimitSolution solve_to_extinction(const DegreeDistribution& theta, const RateFunction& beta,
                                         const RateFunction& rho, double s0, const FinalSizeOptions& opts = {}) {
  return solve_sir_limit(theta, beta, rho, s0, opts.horizon, detail::to_extinction(opts));
}

inline OutbreakResult solve_time_varying(const DegreeDistribution& theta, const RateFunction& beta,
                                         const RateFunction& rho, double s0, const FinalSizeOptions& opts = {}) {
  return detail::from_limit(solve_to_extinction(theta, beta, rho, s0, opts), opts);
}

/// r_hat = J / (1 - e^{-F}) from a limit solution run to extinction.
inline double effective_rate(const LimitSolution& sol) {
  if (!sol.extinct) throw numerical_error("effective rate needs a solution run to extinction");
  const double F = sol.pressure.back();
  return sol.recovery_integral.back() / -std::expm1(-F);
}

inline double effective_rate(const DegreeDistribution& theta, const RateFunction& beta, const RateFunction& rho,
                             double s0, const FinalSizeOptions& opts = {}) {
  return effective_rate(solve_to_extinction(theta, beta, rho, s0, opts));
}

inline OutbreakResult seir_outbreak(const DegreeDistribution& theta, const RateFunction& beta, const RateFunction& rho,
                                    const RateFunction& lambda, double s0, double e0, double i0,
                                    const FinalSizeOptions& opts = {}) {
  const LimitSolution sol =
      solve_seir_limit(theta, beta, rho, lambda, s0, e0, i0, opts.horizon, detail::to_extinction(opts));
  return detail::from_limit(sol, opts);
}

/// z^{(k-2)/k} s0^{2/k} - (1 + r) + r z^{-1/k} s0^{1/k}
inline double phi_kappa(double z, int kappa, double r, double s0) {
  if (z <= 0.0) return std::numeric_limits<double>::infinity();
  const double k = kappa;
  return std::pow(z, (k - 2.0) / k) * std::pow(s0, 2.0 / k) - (1.0 + r) + r * std::pow(z, -1.0 / k) * std::pow(s0, 1.0 / k);
}

/// Limiting susceptible fraction on the kappa-regular graph.
inline double regular_outbreak(int kappa, double r, double s0) {
  if (kappa < 2) throw config_error("regular_outbreak needs kappa >= 2");
  detail::check_ratio(r, s0);
  if (kappa == 2) {
    const double v = 1.0 + (1.0 - s0) / r;
    return s0 / (v * v);
  }
  // phi is +inf at 0, has at most one critical point (a minimum) and equals
  // s0 - 1 < 0 at s0, so the root sits left of min(z*, s0).
  const double k = kappa;
  const double z_star = std::pow(std::pow(s0, -1.0 / k) * r / (k - 2.0), k / (k - 1.0));
  const double hi = std::min(z_star, s0);
  const auto phi = [&](double z) { return phi_kappa(z, kappa, r, s0); };
  const Bracket b = bisect(phi, 0.0, hi, 4.0 * std::numeric_limits<double>::epsilon() * hi, 2000);
  return 0.5 * (b.lo + b.hi);
}

/// s0 exp(kappa (z - 1) / r) - z
inline double phi_mean_field(double z, int kappa, double r, double s0) {
  return s0 * std::exp(static_cast<double>(kappa) * (z - 1.0) / r) - z;
}

/// Root in (0, s0) of the scaled mean-field final-size equation.
inline double mean_field_outbreak(int kappa, double r, double s0) {
  if (kappa < 2) throw config_error("mean_field_outbreak needs kappa >= 2");
  detail::check_ratio(r, s0);
  const auto phi = [&](double z) { return phi_mean_field(z, kappa, r, s0); };
  const Bracket b = bisect(phi, 0.0, s0, 4.0 * std::numeric_limits<double>::epsilon() * s0, 2000);
  return 0.5 * (b.lo + b.hi);
}

/// CSV "kappa,r,s0,method,F,s_final,outbreak,residual"
inline void write_outbreak_header(std::ostream& os) { os << "kappa,r,s0,method,F,s_final,outbreak,residual\n"; }

inline void write_outbreak_row(std::ostream& os, int kappa, double r, double s0, const OutbreakResult& res) {
  csv_row(os, kappa, r, s0, std::string(method_name(res.method)), res.F, res.s_final, res.outbreak, res.residual);
}

/// Wraps a kappa-regular or mean-field final size as a table row; F is the
/// pressure giving the same s_final on the kappa-regular tree.
inline OutbreakResult regular_result(int kappa, double s0, double s_final, OutbreakMethod m, double residual) {
  OutbreakResult res;
  res.s_final = s_final;
  res.outbreak = 1.0 - s_final;
  res.F = -std::log(s_final / s0) / static_cast<double>(kappa);
  res.method = m;
  res.residual = residual;
  return res;
}

}  // namespace netepi
