"""Log-form Gegenbauer GARCH for the conditional variance of residuals.

    ln s2_t = gamma + beta ln s2_{t-1} + [1 - beta L - P(L) psi(L)] u_t,
    u_t = ln eps_t^2 - tau,   P(L) = prod_i (1 - 2 nu_i L + L^2)^{d_i},
    psi(L) = 1 - psi L.

Because ``P(0) psi(0) = 1`` the bracket has no lag-0 term, so ``s2_t`` only
depends on residuals up to ``t - 1``. With every ``d_i = 0`` the recursion
is a log-GARCH(1,1) with ARCH coefficient ``psi - beta``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import signal

from . import _optim
from .errors import DataError, NumericalError
from .garma import D_BOUND, FitInfo, GegenbauerFactor, gegenbauer_product
from .spectral import detect_gfrequencies, periodogram

TAU_GAUSSIAN = -1.27
LOG_FLOOR = 1e-12
DEFAULT_TRUNCATION = 1000


@dataclass(frozen=True)
class GGarchModel:
    gamma: float
    beta: float = 0.0
    psi: float = 0.0
    factors: tuple = ()
    tau: float = TAU_GAUSSIAN
    truncation: int = DEFAULT_TRUNCATION
    fit: Optional[FitInfo] = None

    def __post_init__(self):
        object.__setattr__(
            self,
            "factors",
            tuple(f if isinstance(f, GegenbauerFactor) else GegenbauerFactor(*f) for f in self.factors),
        )
        if not abs(self.beta) < 1:
            raise ValueError("|beta| must be < 1")
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1")
        for f in self.factors:
            if not f.is_stationary:
                raise ValueError(f"non-stationary variance factor {f}")

    def bracket(self, n: Optional[int] = None) -> np.ndarray:
        """Coefficients of ``1 - beta L - P(L) psi(L)`` for lags 0..n (lag 0 is zero)."""
        n = self.truncation if n is None else n
        nus = [f.nu for f in self.factors]
        ds = [f.d for f in self.factors]
        p = gegenbauer_product(nus, ds, n, sign=-1.0)
        pp = p.copy()
        pp[1:] -= self.psi * p[:-1]
        out = -pp
        out[0] += 1.0
        if n >= 1:
            out[1] -= self.beta
        out[0] = 0.0
        return out

    def to_dict(self) -> dict:
        out = {
            "gamma": self.gamma,
            "beta": self.beta,
            "psi": self.psi,
            "factors": [{"nu": f.nu, "d": f.d} for f in self.factors],
            "tau": self.tau,
            "truncation": self.truncation,
        }
        if self.fit is not None:
            out["fit"] = {
                "neg_loglik": self.fit.css,
                "n_obs": self.fit.n_obs,
                "converged": self.fit.converged,
                "std_errors": self.fit.std_errors,
            }
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "GGarchModel":
        fit = doc.get("fit")
        return cls(
            gamma=doc["gamma"],
            beta=doc["beta"],
            psi=doc["psi"],
            factors=tuple(GegenbauerFactor(f["nu"], f["d"]) for f in doc.get("factors", ())),
            tau=doc.get("tau", TAU_GAUSSIAN),
            truncation=doc.get("truncation", DEFAULT_TRUNCATION),
            fit=None
            if fit is None
            else FitInfo(fit["neg_loglik"], fit["n_obs"], fit["converged"], fit.get("std_errors", {})),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "GGarchModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _log_sq(eps, tau):
    return np.log(np.maximum(np.asarray(eps, dtype=float) ** 2, LOG_FLOOR)) - tau


def _recursion(u, gamma, beta, bracket):
    drive = gamma + (signal.fftconvolve(u, bracket)[: u.size] if u.size * bracket.size > 2e5
                     else np.convolve(u, bracket)[: u.size])
    # pre-sample ln s2 starts at the recursion's stationary level gamma/(1-beta)
    zi = [beta * gamma / (1.0 - beta)]
    return signal.lfilter([1.0], [1.0, -beta], drive, zi=zi)[0]


def ggarch_filter(eps, model: GGarchModel, truncation: Optional[int] = None) -> np.ndarray:
    """Conditional log-variances ``ln s2_t`` for each residual."""
    eps = np.asarray(eps, dtype=float)
    if eps.size == 0:
        raise ValueError("empty residual sequence")
    truncation = model.truncation if truncation is None else truncation
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    return _recursion(_log_sq(eps, model.tau), model.gamma, model.beta, model.bracket(truncation))


def ggarch_forecast(model: GGarchModel, eps, h: int) -> np.ndarray:
    """Variance forecasts for the h periods after ``eps`` ends.

    Unrealized ``ln eps^2 - tau`` terms are replaced by their expectation 0.
    """
    if h < 1:
        raise ValueError("forecast horizon must be >= 1")
    eps = np.asarray(eps, dtype=float)
    u = np.concatenate((_log_sq(eps, model.tau), np.zeros(h)))
    # drive for t = N .. N+h-1 needs u up to t-1; the appended zeros never enter at lag 0
    ls = _recursion(u, model.gamma, model.beta, model.bracket())
    return np.exp(ls[eps.size :])


def ggarch_simulate(model: GGarchModel, n: int, burn_in: int = 1000, seed=None) -> np.ndarray:
    """Gaussian residuals ``eps_t = s_t z_t`` from the log-variance recursion."""
    rng = np.random.default_rng(seed)
    total = n + burn_in
    z = rng.standard_normal(total)
    br = model.bracket()[1:]  # lags 1..T
    T = br.size
    u = np.zeros(T + total)
    ls_prev = model.gamma / (1.0 - model.beta)
    eps = np.empty(total)
    for t in range(total):
        past = u[t : t + T][::-1]  # u_{t-1}, u_{t-2}, ...
        ls = model.gamma + model.beta * ls_prev + float(np.dot(br, past))
        ls = min(max(ls, -700.0), 700.0)
        eps[t] = math.exp(0.5 * ls) * z[t]
        u[T + t] = math.log(max(eps[t] ** 2, LOG_FLOOR)) - model.tau
        ls_prev = ls
    return eps[burn_in:]


def _neg_loglik(eps2, ls):
    ls = np.clip(ls, -700, 700)
    return 0.5 * float(np.sum(ls + eps2 * np.exp(-ls)))


def ggarch_fit(
    eps,
    k_v: int = 3,
    frequencies: Optional[Sequence[float]] = None,
    free: bool = False,
    truncation: int = DEFAULT_TRUNCATION,
    n_starts: int = 8,
    seed: int = 0,
    min_separation: float = 0.01,
    workers: int = 1,
) -> GGarchModel:
    """Gaussian quasi-likelihood fit with ``tau`` fixed at -1.27.

    Variance G-frequencies default to the k_v largest separated peaks of the
    periodogram of ``ln eps^2``.
    """
    eps = np.asarray(eps, dtype=float)
    if eps.size < 20:
        raise DataError(f"too few residuals ({eps.size}) for a G-GARCH fit")
    var = float(np.var(eps))
    if not var > 1e-300 or np.mean(eps ** 2 <= LOG_FLOOR) > 0.5:
        raise DataError("degenerate residuals: variance is (near) zero")

    if k_v > 0:
        if frequencies is None:
            frequencies = detect_gfrequencies(periodogram(_log_sq(eps, 0.0)), k_v, min_separation)
        frequencies = np.asarray(frequencies, dtype=float)
        if frequencies.size != k_v:
            raise ValueError(f"expected {k_v} frequencies, got {frequencies.size}")
        nus0 = np.cos(2 * np.pi * frequencies)
    else:
        nus0 = np.zeros(0)

    u = _log_sq(eps, TAU_GAUSSIAN)
    eps2 = eps ** 2
    lv = math.log(var)
    bounds = [(lv - 20, lv + 20), (-0.99, 0.99), (-1.0, 1.0)] + [(-D_BOUND, D_BOUND)] * k_v
    if free:
        bounds += [(-1 + 1e-6, 1 - 1e-6)] * k_v
    names = ["gamma", "beta", "psi"] + [f"d{i + 1}" for i in range(k_v)]
    if free:
        names += [f"nu{i + 1}" for i in range(k_v)]

    def unpack(theta):
        gamma, beta, psi = theta[:3]
        ds = theta[3 : 3 + k_v]
        nus = theta[3 + k_v :] if free else nus0
        return gamma, beta, psi, ds, nus

    def bracket(beta, psi, ds, nus):
        p = gegenbauer_product(nus, ds, truncation, sign=-1.0)
        pp = p.copy()
        pp[1:] -= psi * p[:-1]
        out = -pp
        out[1] -= beta
        out[0] = 0.0
        return out

    def nll(theta):
        gamma, beta, psi, ds, nus = unpack(theta)
        if abs(beta) >= 1:
            return np.inf
        val = _neg_loglik(eps2, _recursion(u, gamma, beta, bracket(beta, psi, ds, nus)))
        return val if np.isfinite(val) else np.inf

    scale = float(eps.size)

    def objective(theta):
        v = nll(theta)
        return v / scale if np.isfinite(v) else 1e12

    rng = np.random.default_rng(seed)
    first = np.concatenate(([lv], [0.0, 0.0], np.full(k_v, 0.1), nus0 if free else []))
    starts = _optim.random_starts(rng, bounds, max(n_starts, 1), first=first)
    for s in starts[1:]:
        s[0] = lv * (1 - s[1]) + rng.normal(0, 0.5)
        if free:
            s[3 + k_v :] = np.clip(nus0 + rng.normal(0, 1e-3, k_v), -1 + 1e-6, 1 - 1e-6)
    res = _optim.multistart_minimize(objective, bounds, starts, workers=workers)
    if not np.isfinite(res.fun) or res.fun >= 1e12:
        raise NumericalError("G-GARCH quasi-likelihood has no finite optimum")
    if res.n_converged == 0:
        raise NumericalError(f"G-GARCH fit did not converge from any of {len(starts)} starts")

    theta = res.x
    gamma, beta, psi, ds, nus = unpack(theta)
    try:
        H = _optim.numerical_hessian(nll, theta)
        ses = _optim.std_errors_from_hessian(H)
    except (ValueError, FloatingPointError):
        ses = np.full(theta.size, np.nan)
    std_errors = {n: (None if not np.isfinite(s) else float(s)) for n, s in zip(names, ses)}
    factors = tuple(GegenbauerFactor(float(nu), float(d)) for nu, d in zip(nus, ds))
    return GGarchModel(
        gamma=float(gamma),
        beta=float(beta),
        psi=float(psi),
        factors=factors,
        tau=TAU_GAUSSIAN,
        truncation=truncation,
        fit=FitInfo(res.fun * scale, int(eps.size), bool(res.converged), std_errors, res.message),
    )
