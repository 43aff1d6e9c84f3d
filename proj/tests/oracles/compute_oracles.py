"""Independent oracle values frozen into the C++ test suites.

Uses mpmath (high precision closed forms / root finding) and scipy's DOP853
integrator, so nothing here shares a code path with the C++ library.
Run: python3 tests/oracles/compute_oracles.py
"""
import math

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

mp.mp.dps = 40


def poisson_values():
    print("poisson(2) pmf(0)        =", mp.e ** -2)
    print("poisson(2) M(-1)         =", mp.exp(2 * (mp.e ** -1 - 1)))
    print("poisson(2) M'(-1)        =", 2 * mp.e ** -1 * mp.exp(2 * (mp.e ** -1 - 1)))
    print("poisson(2) phi(1)        =", 2 * mp.e ** -1)


def psi_example():
    z, r, s0 = mp.mpf("0.3"), 2, mp.mpf("0.95")
    v = z + (-2 * z) - mp.log(1 + r * (1 - mp.e ** z)) + mp.log(s0)
    print("psi_r(0.3; k=3, r=2, s0=.95) =", v)


def sigma_kappa(kappa, r, s0):
    s0 = mp.mpf(s0)
    if kappa == 2:
        # closed form consistent with Psi_r and the 2-regular limit
        return s0 / (1 + (1 - s0) / r) ** 2
    # root of (2-k)F - log(1 + r(1-e^F)) + log s0 = 0 on (0, log(1+1/r))
    f = lambda F: (2 - kappa) * F - mp.log(1 + r * (1 - mp.e ** F)) + mp.log(s0)
    hi = mp.log(1 + mp.mpf(1) / r)
    F = mp.findroot(f, (mp.mpf("1e-30"), hi - mp.mpf("1e-30")), solver="anderson")
    return s0 * mp.e ** (-kappa * F)


def sigma_hat(kappa, r, s0):
    s0 = mp.mpf(s0)
    f = lambda z: s0 * mp.e ** (kappa * (z - 1) / r) - z
    return mp.findroot(f, (mp.mpf("1e-30"), s0), solver="anderson")


def regular_values():
    for r in (0.25, 0.5, 1, 2, 4):
        for s0 in ("0.5", "0.9", "0.99"):
            s = mp.mpf(s0)
            print(f"  r={r} s0={s0}: sigma_2 = {mp.nstr(sigma_kappa(2, r, s0), 15)}"
                  f"  printed s0/(1+r(1-s0))^2 = {mp.nstr(s / (1 + r * (1 - s)) ** 2, 15)}")
    print("sigma_2(r=1,s0=.9)       =", sigma_kappa(2, 1, "0.9"))
    print("sigma_3(r=2,s0=.95)      =", sigma_kappa(3, 2, "0.95"))
    print("sigma_hat_3(r=2,s0=.95)  =", sigma_hat(3, 2, "0.95"))
    for k in range(2, 9):
        print(f"  sigma_{k}(r=2, s0=.95) = {mp.nstr(sigma_kappa(k, 2, '0.95'), 15)}"
              f"  sigma_hat = {mp.nstr(sigma_hat(k, 2, '0.95'), 15)}")


def limit_ode(theta, beta, rho, s0, t_end=200.0):
    ks = np.arange(len(theta))
    mean = float((ks * theta).sum())
    theta_hat = np.array([(k + 1) * theta[k + 1] for k in range(len(theta) - 1)]) / mean
    kh = np.arange(len(theta_hat))

    def phi(F):
        w = theta_hat * np.exp(-kh * F)
        return (kh * w).sum() / w.sum()

    # state: fS, fI, FI, J = int e^{-FI} rho fI
    def rhs(t, y):
        fS, fI, FI, J = y
        b, r = beta(t), rho(t)
        p = phi(FI)
        return [fS * fI * b * (1 - p),
                fS * fI * b * p - fI * (r + b - b * fI),
                b * fI,
                math.exp(-FI) * r * fI]

    sol = solve_ivp(rhs, (0, t_end), [s0, 1 - s0, 0.0, 0.0], method="DOP853",
                    rtol=1e-12, atol=1e-14, dense_output=True)
    FI = sol.y[2, -1]
    s_final = s0 * float((theta * np.exp(-ks * FI)).sum())
    J = sol.y[3, -1]
    r_hat = J / (1 - math.exp(-FI))
    return sol, FI, s_final, r_hat


def ramp(v0, v1, t0=0.0, t1=10.0):
    def f(t):
        if t <= t0:
            return v0
        if t >= t1:
            return v1
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    return f


def figure3():
    theta = np.array([0, 0, 0, 1.0])
    for s0 in (0.9, 0.99):
        for name, rho in (("A", ramp(0.5, 1.5)), ("B", ramp(1.5, 0.5))):
            beta = lambda t, rho=rho: rho(t) / (1.5 + math.sin(math.pi * t))
            _, F, s_final, r_hat = limit_ode(theta, beta, rho, s0, t_end=300)
            print(f"fig3 scenario {name} (s0={s0}): F={F:.12f} s_final={s_final:.12f} r_hat={r_hat:.12f}")


def figure4():
    theta = np.array([0, 0, 0, 1.0])
    for omega, delta, A in ((1.0, 0.0, 0.5), (0.5, 0.0, 0.0), (10.0, 0.0, 0.5), (10.0, 0.5, 0.5)):
        beta = lambda t: 1 + A * math.sin((t + delta * omega) * 2 * math.pi / omega)
        _, F, s_final, _ = limit_ode(theta, beta, lambda t: 1.0, 0.99, t_end=300)
        print(f"fig4 omega={omega} delta={delta} A={A} (s0=0.99): outbreak={1 - s_final:.12f}")


def poisson_constant():
    c = 2.0
    K = 60
    theta = np.array([math.exp(-c) * c ** k / math.factorial(k) for k in range(K)])
    theta /= theta.sum()
    _, F, s_final, _ = limit_ode(theta, lambda t: 0.5, lambda t: 1.0, 0.9)
    print(f"poisson(2) beta=.5 rho=1 s0=.9: F={F:.12f} s_final={s_final:.12f}")


def line_graph():
    s0, b, r = 0.9, 1.0, 1.0
    print("line graph P_SS(inf) s0=.9 b=r=1 =", (1 / (1 + (1 - s0) * b / r)) ** 2,
          " s-limit =", s0 * (1 / (1 + (1 - s0) * b / r)) ** 2)


if __name__ == "__main__":
    poisson_values()
    psi_example()
    regular_values()
    line_graph()
    poisson_constant()
    figure3()
    figure4()
