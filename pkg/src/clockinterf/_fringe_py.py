"""Pure-numpy fringe-model kernels (fallback for the compiled extension).

Parameter vector, in normalised units::

    p = [A, uc, s, V, kappa, chi, b]
    model(u) = A exp(-(u - uc)**2 / (2 s**2)) (1 + V sin(kappa u + chi)) + b
"""

import numpy as np


def fringe_model(u, p):
    A, uc, s, V, kappa, chi, b = p
    g = np.exp(-((u - uc) ** 2) / (2 * s * s))
    return A * g * (1 + V * np.sin(kappa * u + chi)) + b


def fringe_cost(u, y, p):
    r = fringe_model(u, p) - y
    return 0.5 * float(r @ r)


def fringe_normal_equations(u, y, p):
    """Return ``(cost, J^T J, J^T r)`` for the residual ``model - y``."""
    A, uc, s, V, kappa, chi, b = p
    du = u - uc
    g = np.exp(-(du**2) / (2 * s * s))
    phase = kappa * u + chi
    sn = np.sin(phase)
    cs = np.cos(phase)
    mod = 1 + V * sn
    agm = A * g * mod
    r = agm + b - y
    agvc = A * g * V * cs
    jac = np.empty((u.size, 7))
    jac[:, 0] = g * mod
    jac[:, 1] = agm * du / (s * s)
    jac[:, 2] = agm * du * du / (s * s * s)
    jac[:, 3] = A * g * sn
    jac[:, 4] = agvc * u
    jac[:, 5] = agvc
    jac[:, 6] = 1.0
    return 0.5 * float(r @ r), jac.T @ jac, jac.T @ r
