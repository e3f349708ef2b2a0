"""Periodogram, semiparametric long-memory estimators and G-frequency peaks.

Frequencies are in cycles per sample everywhere in the public API; radian
frequencies only appear inside the estimating equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .errors import NumericalError

BANDWIDTH_EXPONENTS = (0.5, 0.6, 0.7, 0.8)


@dataclass(frozen=True)
class Periodogram:
    freqs: np.ndarray
    power: np.ndarray

    @property
    def n(self) -> int:
        return self.freqs.size


@dataclass(frozen=True)
class LongMemoryEstimate:
    d_hat: float
    std_error: float
    p_value: float
    bandwidth: int
    method: str


def bandwidth(n_obs: int, exponent: float) -> int:
    """``N**exponent`` rounded half-up (13128**0.5 -> 115)."""
    return int(math.floor(n_obs ** exponent + 0.5))


def periodogram(x) -> Periodogram:
    """``I(f_j) = |sum_t (x_t - xbar) exp(-2 pi i f_j t)|^2 / N`` at ``f_j = j/N``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 8:
        raise ValueError(f"periodogram needs at least 8 observations, got {n}")
    spec = np.fft.rfft(x - x.mean())
    m = n // 2
    power = np.abs(spec[1 : m + 1]) ** 2 / n
    freqs = np.arange(1, m + 1) / n
    return Periodogram(freqs, power)


def _normal_p(d_hat: float, se: float) -> float:
    return float(2.0 * stats.norm.sf(abs(d_hat / se)))


def _check_bandwidth(n: int, m: int):
    if not 2 <= m <= n // 2:
        raise ValueError(f"bandwidth m={m} outside [2, {n // 2}]")


def gph_estimate(x, m: int) -> LongMemoryEstimate:
    """Geweke-Porter-Hudak log-periodogram regression.

    Regresses ``ln I(f_j)`` on ``-ln(4 sin^2(pi f_j))`` for j = 1..m; the
    slope estimates d and its OLS standard error is reported.
    """
    x = np.asarray(x, dtype=float)
    _check_bandwidth(x.size, m)
    pg = periodogram(x)
    power = pg.power[:m]
    if np.any(power <= 0):
        raise NumericalError("zero periodogram ordinate in the regression band; spectrum is degenerate")
    regressor = -np.log(4.0 * np.sin(np.pi * pg.freqs[:m]) ** 2)
    fit = stats.linregress(regressor, np.log(power))
    d_hat = float(fit.slope)
    se = float(fit.stderr)
    return LongMemoryEstimate(d_hat, se, _normal_p(d_hat, se), m, "GPH")


def _whittle_objective(d, lam, power, mean_log_lam):
    return math.log(np.mean(lam ** (2 * d) * power)) - 2 * d * mean_log_lam


def local_whittle_estimate(x, m: int) -> LongMemoryEstimate:
    """Robinson's local Whittle estimator with standard error ``1/(2 sqrt(m))``."""
    x = np.asarray(x, dtype=float)
    _check_bandwidth(x.size, m)
    pg = periodogram(x)
    power = pg.power[:m]
    if not np.any(power > 0):
        raise NumericalError("all periodogram ordinates are zero; local Whittle undefined")
    lam = 2 * np.pi * pg.freqs[:m]
    mean_log_lam = float(np.mean(np.log(lam)))
    lo, hi = -1.0, 1.0
    res = optimize.minimize_scalar(
        _whittle_objective,
        bounds=(lo, hi),
        args=(lam, power, mean_log_lam),
        method="bounded",
        options={"xatol": 1e-8},
    )
    d_hat = float(res.x)
    if not res.success or not np.isfinite(res.fun) or min(d_hat - lo, hi - d_hat) < 1e-5:
        raise NumericalError(f"local Whittle minimum not bracketed in ({lo}, {hi}); d={d_hat}")
    se = 1.0 / (2.0 * math.sqrt(m))
    return LongMemoryEstimate(d_hat, se, _normal_p(d_hat, se), m, "LocalWhittle")


def long_memory_table(x, exponents=BANDWIDTH_EXPONENTS) -> list[LongMemoryEstimate]:
    """GPH and LW estimates over a grid of bandwidth exponents."""
    n = len(x)
    rows = []
    for e in exponents:
        m = bandwidth(n, e)
        rows.append(gph_estimate(x, m))
        rows.append(local_whittle_estimate(x, m))
    return rows


def detect_gfrequencies(pg: Periodogram, k: int, min_separation: float) -> np.ndarray:
    """Frequencies of the k largest, mutually separated periodogram peaks.

    Local maxima are taken greedily in descending power, skipping any within
    ``min_separation`` of one already chosen. Returned in ascending order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if min_separation <= 0:
        raise ValueError("min_separation must be positive")
    p = pg.power
    left = np.concatenate(([-np.inf], p[:-1]))
    right = np.concatenate((p[1:], [-np.inf]))
    peaks = np.flatnonzero((p > left) & (p >= right))
    order = peaks[np.argsort(-p[peaks], kind="stable")]
    chosen: list[float] = []
    for i in order:
        f = pg.freqs[i]
        if all(abs(f - c) >= min_separation for c in chosen):
            chosen.append(float(f))
            if len(chosen) == k:
                break
    if len(chosen) < k:
        raise ValueError(f"only {len(chosen)} separated local maxima found, {k} requested")
    return np.sort(np.array(chosen))
