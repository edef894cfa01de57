"""Damped least squares (Levenberg-Marquardt schedule).

Damping is scaled by the diagonal of ``J^T J``; it is multiplied by three
after a rejected trial step and divided by three after an accepted one.
Optional box bounds are enforced by projecting each trial point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

NormalEquations = Callable[[np.ndarray], "tuple[float, np.ndarray, np.ndarray]"]


@dataclass
class LMResult:
    params: np.ndarray
    cost: float
    converged: bool
    iterations: int


def damped_least_squares(
    normal_equations: NormalEquations,
    cost: Callable[[np.ndarray], float],
    p0,
    *,
    max_iter: int = 200,
    xtol: float = 1e-9,
    ftol: float = 1e-8,
    damping: float = 1e-3,
    factor: float = 3.0,
    lower=None,
    upper=None,
) -> LMResult:
    """Minimise ``0.5 * |r(p)|**2``.

    ``normal_equations(p)`` returns ``(cost, J^T J, J^T r)``.  Convergence is
    declared when the (projected) step is smaller than ``xtol`` relative to
    the parameter norm, or when an accepted step lowers the cost by less
    than ``ftol`` relative; otherwise the best point after ``max_iter``
    trial steps is returned with ``converged=False``.
    """
    lo = -np.inf if lower is None else np.asarray(lower, dtype=float)
    hi = np.inf if upper is None else np.asarray(upper, dtype=float)
    p = np.clip(np.array(p0, dtype=float), lo, hi)
    c, jtj, jtr = normal_equations(p)
    lam = damping
    for it in range(1, max_iter + 1):
        # parameters pinned at a bound with the gradient pointing outwards
        # are frozen for this step
        free = ~(((p <= lo) & (jtr > 0)) | ((p >= hi) & (jtr < 0)))
        sub = jtj[np.ix_(free, free)]
        diag = np.diag(sub).copy()
        floor = 1e-12 * diag.max() if diag.size and diag.max() > 0 else 1e-30
        np.maximum(diag, floor, out=diag)
        step = np.zeros_like(p)
        try:
            step[free] = np.linalg.solve(sub + lam * np.diag(diag), -jtr[free])
        except np.linalg.LinAlgError:
            lam *= factor
            continue
        if not np.all(np.isfinite(step)):
            lam *= factor
            continue
        trial = np.clip(p + step, lo, hi)
        if np.linalg.norm(trial - p) <= xtol * (np.linalg.norm(p) + xtol):
            return LMResult(p, c, True, it)
        c_trial = cost(trial)
        if np.isfinite(c_trial) and c_trial < c:
            small = c - c_trial <= ftol * c
            p = trial
            c, jtj, jtr = normal_equations(p)
            if small:
                return LMResult(p, c, True, it)
            lam = max(lam / factor, 1e-15)
        else:
            lam *= factor
    return LMResult(p, c, False, max_iter)
