"""Multi-start bounded Nelder-Mead and finite-difference Hessians."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize


@dataclass
class MultiStartResult:
    x: np.ndarray
    fun: float
    converged: bool
    n_converged: int
    best_start: int
    message: str


def multistart_minimize(fun, bounds, starts, *, maxiter=None, xatol=1e-6, fatol=1e-9, workers=1):
    """Run bounded Nelder-Mead from each start; keep the lowest objective.

    Ties go to the lowest start index so the result does not depend on
    evaluation order.
    """
    bounds = [tuple(b) for b in bounds]
    dim = len(bounds)
    maxiter = maxiter or 400 * max(dim, 1)

    def run(x0):
        return optimize.minimize(
            fun,
            np.asarray(x0, dtype=float),
            method="Nelder-Mead",
            bounds=bounds,
            options={"maxiter": maxiter, "maxfev": 2 * maxiter, "xatol": xatol, "fatol": fatol},
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(x0) for x0 in starts]

    best_idx = None
    for i, res in enumerate(results):
        if not np.isfinite(res.fun):
            continue
        if best_idx is None or res.fun < results[best_idx].fun:
            best_idx = i
    n_conv = sum(bool(r.success) for r in results)
    if best_idx is None:
        return MultiStartResult(np.asarray(starts[0], float), np.inf, False, 0, -1, "no finite objective")
    best = results[best_idx]
    return MultiStartResult(
        np.asarray(best.x), float(best.fun), bool(best.success), n_conv, best_idx, str(best.message)
    )


def random_starts(rng, bounds, n, first=None, shrink=0.8):
    """``n`` start points: ``first`` (if given) then uniform draws inside the box."""
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    mid, half = (lo + hi) / 2, (hi - lo) / 2 * shrink
    starts = [] if first is None else [np.clip(np.asarray(first, float), lo, hi)]
    while len(starts) < n:
        starts.append(mid + half * rng.uniform(-1, 1, size=lo.size))
    return starts


def numerical_hessian(fun, x, rel_step=1e-4):
    x = np.asarray(x, dtype=float)
    n = x.size
    steps = rel_step * np.maximum(np.abs(x), 1e-2)
    H = np.empty((n, n))
    f0 = fun(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = steps[i]
        H[i, i] = (fun(x + ei) - 2 * f0 + fun(x - ei)) / steps[i] ** 2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = steps[j]
            H[i, j] = H[j, i] = (
                fun(x + ei + ej) - fun(x + ei - ej) - fun(x - ei + ej) + fun(x - ei - ej)
            ) / (4 * steps[i] * steps[j])
    return H


def std_errors_from_hessian(H, scale=1.0):
    """``sqrt(diag(scale * H^-1))``; NaN where the curvature is not positive."""
    try:
        cov = scale * np.linalg.inv(H)
    except np.linalg.LinAlgError:
        return np.full(H.shape[0], np.nan)
    diag = np.diag(cov)
    with np.errstate(invalid="ignore"):
        return np.where(diag > 0, np.sqrt(np.abs(diag)), np.nan)
