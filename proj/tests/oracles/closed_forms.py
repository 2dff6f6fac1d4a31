"""Independent oracle for closed-form expected values frozen into the C++ tests.

Run: python3 tests/oracles/closed_forms.py
"""
import math

import numpy as np
from scipy import optimize


def theorem1(delta, d, lf, rho, gap, fail):
    eps = 3 * delta
    r = 4 * delta**0.6 * d**0.3 / math.sqrt(rho)
    big_r = delta**0.4 * d**0.2 / math.sqrt(rho)
    arg = rho * gap / (48 * lf * fail * (delta**1.2 * d**0.6 + delta**1.4 * d**0.7))
    q = max(1, math.ceil(2 * math.log(arg))) if arg > 0 else 1
    tth = max(1, math.ceil(lf / (384 * (math.sqrt(rho) + lf) * (delta**0.4 * d**0.2 + delta**0.6 * d**0.3))))
    bound = math.ceil(2 * gap * lf / (3 * delta**2) * q)
    return dict(eps=eps, r=r, R=big_r, Q=q, T_th=tth, iter_bound=bound)


def theorem2(eps, lf, rho, gap):
    big_r = math.sqrt(eps / rho)
    tth = max(1, math.ceil(lf / (12 * rho * (big_r + eps))))
    return dict(r=eps, R=big_r, T_th=tth, iter_bound=math.ceil(2 * lf * gap / eps**2))


def stuck_probability(x):
    if x >= 1:
        return 1.0
    return 2 / math.pi * (math.asin(x) + x * math.sqrt(1 - x * x))


def clamped_saddle_phi(t, lam, kappa, b):
    """phi(t) by numerical integration of phi'' (independent of the C++ closed form)."""
    def phi2(s):
        s = abs(s)
        if s <= b:
            return -lam
        if s <= 2 * b:
            return -lam + (lam + kappa) * (s - b) / b
        return kappa
    from scipy import integrate
    dphi = lambda s: integrate.quad(phi2, 0, s, points=[b, 2 * b] if s > b else None)[0]
    return integrate.quad(dphi, 0, t, limit=200)[0]


if __name__ == "__main__":
    print("theorem1 d=1", theorem1(0.01, 1, 1, 1, 1, 0.1))
    print("theorem2", theorem2(0.01, 1, 1, 1))
    print("stuck x=0.5", stuck_probability(0.5))
    lam, kappa, b = 0.5, 1.0, 1.0
    res = optimize.minimize_scalar(lambda t: clamped_saddle_phi(t, lam, kappa, b), bounds=(b, 4 * b), method="bounded",
                                   options=dict(xatol=1e-10))
    print("clamped saddle argmin/min (b=1)", res.x, res.fun)
    print("phi(1.5)", clamped_saddle_phi(1.5, lam, kappa, b), "phi(3)", clamped_saddle_phi(3.0, lam, kappa, b))
    # quartic with clamp c=2: value at 3 = F(c)+F'(c)(w-c)+F''(c)(w-c)^2/2
    c = 2.0
    F = lambda w: (w * w - 1) ** 2 / 4
    print("quartic clamp value at 3:", F(c) + (c**3 - c) * 1 + (3 * c * c - 1) / 2)
    # top principal direction of (3,4)
    M = np.outer([3, 4], [3, 4])
    ev, vec = np.linalg.eigh(M)
    print("top eig", ev[-1], vec[:, -1])
    # derive-params CLI example with gap=1, delta_fail=0.1, d=1
    print("theorem1 saddle b=1 d=2 gap=0.78125", theorem1(0.01, 2, 1, 1.5, 0.78125, 0.1))
    print("theorem2 saddle b=2000", theorem2(0.01, 1, 1.5 / 2000, 0.78125 * 2000**2))
