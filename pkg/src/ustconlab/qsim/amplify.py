"""Fixed-point amplitude amplification phases.

For L = 2l + 1 oracle calls and target error delta, the phases

    alpha_j = beta_{l-j+1} = 2 arccot(tan(2 pi j / L) sqrt(1 - gamma^2)),
    1/gamma = T_{1/L}(1/delta),

make G(alpha_l, beta_l) ... G(alpha_1, beta_1) with
G(alpha, beta) = -S_s(alpha) S_t(beta),
S_s(alpha) = I - (1 - e^{i alpha})|s><s| and S_t likewise, reach success probability at least
1 - delta^2 whenever the initial overlap squared is at least w and
L >= log(2/delta) / sqrt(w).
"""
from __future__ import annotations

import math

import numpy as np


def chebyshev_t(order: float, x: float) -> float:
    """T_order(x) for x >= 1 (non-integer order allowed)."""
    return math.cosh(order * math.acosh(x))


def _arccot(x: float) -> float:
    # principal branch in (0, pi)
    return math.pi / 2 - math.atan(x)


def fixed_point_phases(l: int, delta: float) -> tuple:
    L = 2 * l + 1
    gamma = 1.0 / chebyshev_t(1.0 / L, 1.0 / delta)
    root = math.sqrt(max(0.0, 1.0 - gamma * gamma))
    alphas = np.array([2 * _arccot(math.tan(2 * math.pi * j / L) * root) for j in range(1, l + 1)])
    betas = alphas[::-1].copy()
    return alphas, betas


def fixed_point_rounds(w: float, delta: float) -> int:
    """Smallest l with 2l + 1 >= log(2/delta) / sqrt(w)."""
    if w >= 1:
        return 0
    need = math.log(2.0 / delta) / math.sqrt(w)
    return max(0, math.ceil((need - 1) / 2))


def fixed_point_success(lam: float, l: int, delta: float) -> float:
    """Closed-form success probability 1 - delta^2 T_L(T_{1/L}(1/delta) sqrt(1-lam))^2."""
    L = 2 * l + 1
    x = chebyshev_t(1.0 / L, 1.0 / delta) * math.sqrt(1 - lam)
    TL = math.cos(L * math.acos(x)) if x <= 1 else math.cosh(L * math.acosh(x))
    return 1 - delta * delta * TL * TL


def two_level_run(lam: float, alphas, betas) -> float:
    """Simulate the sequence on the plane spanned by target and complement."""
    s = np.array([math.sqrt(lam), math.sqrt(1 - lam)], dtype=complex)
    t = np.array([1.0, 0.0], dtype=complex)
    psi = s.copy()
    for a, b in zip(alphas, betas):
        psi = psi - (1 - np.exp(1j * b)) * t * np.vdot(t, psi)
        psi = psi - (1 - np.exp(1j * a)) * s * np.vdot(s, psi)
        psi = -psi
    return float(abs(psi[0]) ** 2)
