"""k-factor GARMA conditional-mean model.

    Phi(L) prod_i (1 - 2 nu_i L + L^2)^{d_i} (y_t - mu) = Theta(L) eps_t

with ``Phi(L) = 1 - phi_1 L - ...`` and ``Theta(L) = 1 + theta_1 L + ...``.
Infinite expansions are truncated at ``truncation`` lags and pre-sample
deviations are taken as zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import signal

from . import _optim
from .errors import DataError, NumericalError
from .spectral import detect_gfrequencies, periodogram

DEFAULT_TRUNCATION = 1000
D_BOUND = 0.49
NU_BOUND = 1 - 1e-6


@dataclass(frozen=True)
class GegenbauerFactor:
    nu: float
    d: float

    @property
    def is_stationary(self) -> bool:
        if abs(self.nu) < 1:
            return self.d < 0.5
        if abs(self.nu) == 1:
            return self.d < 0.25
        return False

    @property
    def is_long_memory(self) -> bool:
        return self.d > 0

    @property
    def frequency(self) -> float:
        """G-frequency in cycles per sample."""
        return math.acos(max(-1.0, min(1.0, self.nu))) / (2 * math.pi)

    @classmethod
    def from_frequency(cls, f: float, d: float) -> "GegenbauerFactor":
        return cls(math.cos(2 * math.pi * f), d)


@dataclass(frozen=True)
class FitInfo:
    css: float
    n_obs: int
    converged: bool
    std_errors: dict = field(default_factory=dict)
    message: str = ""


def _poly_roots_ok(coefs, sign) -> bool:
    """True if all roots of 1 + sign*(c1 z + c2 z^2 + ...) lie outside the unit circle."""
    coefs = np.asarray(coefs, dtype=float)
    if coefs.size == 0 or not np.any(coefs):
        return True
    poly = np.concatenate(([1.0], sign * coefs))
    roots = np.roots(poly[::-1])
    return bool(np.all(np.abs(roots) > 1 + 1e-8))


@dataclass(frozen=True)
class GarmaModel:
    mu: float = 0.0
    ar: tuple = ()
    ma: tuple = ()
    factors: tuple = ()
    sigma2: float = 1.0
    truncation: int = DEFAULT_TRUNCATION
    fit: Optional[FitInfo] = None

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(v) for v in self.ar))
        object.__setattr__(self, "ma", tuple(float(v) for v in self.ma))
        object.__setattr__(
            self,
            "factors",
            tuple(f if isinstance(f, GegenbauerFactor) else GegenbauerFactor(*f) for f in self.factors),
        )
        if self.sigma2 < 0:
            raise ValueError("innovation variance must be non-negative")
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1")
        if not _poly_roots_ok(self.ar, -1):
            raise ValueError(f"AR polynomial {self.ar} has roots inside the unit circle")
        if not _poly_roots_ok(self.ma, +1):
            raise ValueError(f"MA polynomial {self.ma} has roots inside the unit circle")
        for f in self.factors:
            if not f.is_stationary:
                raise ValueError(f"non-stationary Gegenbauer factor {f}")
        nus = sorted(f.nu for f in self.factors)
        if any(b - a <= 1e-6 for a, b in zip(nus, nus[1:])):
            raise ValueError("Gegenbauer frequencies must be distinct")

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def ar_poly(self) -> np.ndarray:
        return np.concatenate(([1.0], -np.asarray(self.ar)))

    @property
    def ma_poly(self) -> np.ndarray:
        return np.concatenate(([1.0], np.asarray(self.ma)))

    def to_dict(self) -> dict:
        out = {
            "mu": self.mu,
            "ar": list(self.ar),
            "ma": list(self.ma),
            "factors": [{"nu": f.nu, "d": f.d} for f in self.factors],
            "sigma2": self.sigma2,
            "truncation": self.truncation,
        }
        if self.fit is not None:
            out["fit"] = {
                "css": self.fit.css,
                "n_obs": self.fit.n_obs,
                "converged": self.fit.converged,
                "std_errors": self.fit.std_errors,
            }
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "GarmaModel":
        fit = doc.get("fit")
        return cls(
            mu=doc["mu"],
            ar=doc.get("ar", ()),
            ma=doc.get("ma", ()),
            factors=tuple(GegenbauerFactor(f["nu"], f["d"]) for f in doc.get("factors", ())),
            sigma2=doc["sigma2"],
            truncation=doc.get("truncation", DEFAULT_TRUNCATION),
            fit=None if fit is None else FitInfo(fit["css"], fit["n_obs"], fit["converged"], fit.get("std_errors", {})),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "GarmaModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _gegenbauer(nu: float, d: float, n: int) -> np.ndarray:
    c = np.zeros(n + 1)
    c[0] = 1.0
    if n >= 1:
        c[1] = 2 * d * nu
    for j in range(2, n + 1):
        c[j] = 2 * nu * ((d - 1) / j + 1) * c[j - 1] - (2 * (d - 1) / j + 1) * c[j - 2]
    return c


def gegenbauer_coeffs(factor: GegenbauerFactor, n: int) -> np.ndarray:
    """Coefficients C_0..C_n of ``(1 - 2 nu L + L^2)^{-d}``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return _gegenbauer(factor.nu, factor.d, n)


def gegenbauer_product(nus, ds, n: int, sign: float = 1.0) -> np.ndarray:
    """Truncated product of ``(1 - 2 nu_i L + L^2)^{-sign*d_i}`` (n+1 terms)."""
    out = np.zeros(n + 1)
    out[0] = 1.0
    for nu, d in zip(nus, ds):
        out = np.convolve(out, _gegenbauer(nu, sign * d, n))[: n + 1]
    return out


def _causal_fir(x, coefs):
    if coefs.size == 1:
        return coefs[0] * x
    if coefs.size * x.size > 2e5:
        return signal.fftconvolve(x, coefs)[: x.size]
    return np.convolve(x, coefs)[: x.size]


def _filter(dev, nus, ds, ar_poly, ma_poly, truncation):
    z = _causal_fir(dev, gegenbauer_product(nus, ds, truncation, sign=-1.0))
    if ar_poly.size > 1 or ma_poly.size > 1:
        z = signal.lfilter(ar_poly, ma_poly, z)
    return z


def garma_apply_filter(x, model: GarmaModel, truncation: Optional[int] = None) -> np.ndarray:
    """Residuals ``eps_t`` of ``x`` under ``model`` (pre-sample deviations zero)."""
    truncation = model.truncation if truncation is None else truncation
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    x = np.asarray(x, dtype=float)
    nus = [f.nu for f in model.factors]
    ds = [f.d for f in model.factors]
    return _filter(x - model.mu, nus, ds, model.ar_poly, model.ma_poly, truncation)


def ar_infinity_weights(model: GarmaModel, n: Optional[int] = None) -> np.ndarray:
    """First n+1 weights of ``pi(L) = Phi(L)/Theta(L) * prod_i G_i(L)^{d_i}``."""
    n = model.truncation if n is None else n
    impulse = np.zeros(n + 1)
    impulse[0] = 1.0
    arma = signal.lfilter(model.ar_poly, model.ma_poly, impulse)
    nus = [f.nu for f in model.factors]
    ds = [f.d for f in model.factors]
    return np.convolve(arma, gegenbauer_product(nus, ds, n, sign=-1.0))[: n + 1]


def garma_forecast(model: GarmaModel, history, h: int) -> np.ndarray:
    """Iterated one-step mean forecasts from the truncated AR(inf) form.

    Unknown future innovations are set to zero; values before the start of
    ``history`` are taken as ``mu``.
    """
    if h < 1:
        raise ValueError("forecast horizon must be >= 1")
    pi = ar_infinity_weights(model)
    T = pi.size - 1
    dev = np.asarray(history, dtype=float) - model.mu
    buf = np.concatenate((np.zeros(max(0, T - dev.size)), dev[-T:] if T else dev[:0], np.zeros(h)))
    start = buf.size - h
    lags = pi[1:][::-1]  # weight for lag T .. lag 1
    for i in range(h):
        t = start + i
        buf[t] = -np.dot(lags, buf[t - T : t])
    return model.mu + buf[start:]


def garma_simulate(model: GarmaModel, n: int, burn_in: Optional[int] = None, seed=None) -> np.ndarray:
    """Draw ``n`` observations with Gaussian innovations via the truncated MA(inf) form."""
    burn_in = model.truncation if burn_in is None else burn_in
    if burn_in < model.truncation:
        raise ValueError(f"burn_in ({burn_in}) must be >= truncation ({model.truncation})")
    rng = np.random.default_rng(seed)
    total = n + burn_in
    eps = rng.normal(0.0, math.sqrt(model.sigma2), size=total)
    nus = [f.nu for f in model.factors]
    ds = [f.d for f in model.factors]
    z = _causal_fir(eps, gegenbauer_product(nus, ds, model.truncation, sign=1.0))
    if model.ar or model.ma:
        z = signal.lfilter(model.ma_poly, model.ar_poly, z)
    return model.mu + z[burn_in:]


def frequency_report(factor: GegenbauerFactor) -> dict:
    nu = factor.nu
    if abs(nu) > 1:
        raise ValueError("|nu| must be <= 1")
    lam = math.acos(nu)
    f = lam / (2 * math.pi)
    return {
        "nu": nu,
        "lambda_radians": lam,
        "f_cycles": f,
        "period": math.inf if f == 0 else 1.0 / f,
    }


class _CssProblem:
    """Packs/unpacks the parameter vector and evaluates the CSS objective."""

    def __init__(self, x, k, p, q, nus_fixed, free, include_mean, truncation, burn):
        self.x = x
        self.k, self.p, self.q = k, p, q
        self.nus_fixed = nus_fixed
        self.free = free
        self.include_mean = include_mean
        self.truncation = truncation
        self.burn = burn
        self.ones = np.ones_like(x)

    @property
    def bounds(self):
        b = [(-0.99, 0.99)] * (self.p + self.q) + [(-D_BOUND, D_BOUND)] * self.k
        if self.free:
            b += [(-NU_BOUND, NU_BOUND)] * self.k
        return b

    def names(self):
        names = [f"ar{i + 1}" for i in range(self.p)] + [f"ma{i + 1}" for i in range(self.q)]
        names += [f"d{i + 1}" for i in range(self.k)]
        if self.free:
            names += [f"nu{i + 1}" for i in range(self.k)]
        return names

    def unpack(self, theta):
        p, q, k = self.p, self.q, self.k
        ar = theta[:p]
        ma = theta[p : p + q]
        ds = theta[p + q : p + q + k]
        nus = theta[p + q + k :] if self.free else self.nus_fixed
        return ar, ma, ds, nus

    def admissible(self, ar, ma):
        return _poly_roots_ok(ar, -1) and _poly_roots_ok(ma, +1)

    def residual_parts(self, theta):
        ar, ma, ds, nus = self.unpack(theta)
        arp = np.concatenate(([1.0], -ar))
        map_ = np.concatenate(([1.0], ma))
        a = _filter(self.x, nus, ds, arp, map_, self.truncation)
        b = _filter(self.ones, nus, ds, arp, map_, self.truncation) if self.include_mean else None
        return a[self.burn :], None if b is None else b[self.burn :]

    def best_mu(self, theta):
        a, b = self.residual_parts(theta)
        if b is None:
            return 0.0, a
        bb = float(np.dot(b, b))
        mu = float(np.dot(a, b) / bb) if bb > 0 else 0.0
        return mu, a - mu * b

    def profile_css(self, theta):
        ar, ma, _, nus = self.unpack(theta)
        if not self.admissible(ar, ma):
            return np.inf
        if self.free and self.k > 1:
            s = np.sort(nus)
            if np.any(np.diff(s) <= 1e-6):
                return np.inf
        _, eps = self.best_mu(theta)
        return float(np.dot(eps, eps))

    def full_css(self, vec):
        """CSS as a function of (mu, theta) for the Hessian."""
        if self.include_mean:
            mu, theta = vec[0], vec[1:]
        else:
            mu, theta = 0.0, vec
        a, b = self.residual_parts(theta)
        eps = a if b is None else a - mu * b
        return float(np.dot(eps, eps))


def garma_fit(
    x,
    k: int = 3,
    p: int = 1,
    q: int = 0,
    frequencies: Optional[Sequence[float]] = None,
    free: bool = False,
    truncation: int = DEFAULT_TRUNCATION,
    include_mean: bool = False,
    n_starts: int = 8,
    seed: int = 0,
    burn: int = 0,
    min_separation: float = 0.01,
    workers: int = 1,
) -> GarmaModel:
    """Conditional-sum-of-squares fit of a k-factor GARMA(p, q) model.

    Gegenbauer frequencies (cycles/sample) are taken from ``frequencies``
    or, when omitted, from the k largest separated periodogram peaks. With
    ``free=True`` they only seed the search and are re-estimated. The mean
    is profiled out in closed form when ``include_mean`` is set. The first
    ``burn`` residuals are excluded from the objective.

    Raises
    ------
    DataError
        Fewer than ``10 * (p + q + 2k + 1)`` observations.
    NumericalError
        No multi-start run converged, or free frequencies collided.
    """
    x = np.asarray(x, dtype=float)
    n_min = 10 * (p + q + 2 * k + 1)
    if x.size < n_min:
        raise DataError(f"insufficient data: {x.size} observations, need >= {n_min} for k={k}, p={p}, q={q}")
    if not 0 <= burn < x.size - 1:
        raise ValueError("burn must leave at least two residuals")

    if k > 0:
        if frequencies is None:
            frequencies = detect_gfrequencies(periodogram(x), k, min_separation)
        frequencies = np.asarray(frequencies, dtype=float)
        if frequencies.size != k:
            raise ValueError(f"expected {k} frequencies, got {frequencies.size}")
        nus0 = np.cos(2 * np.pi * frequencies)
    else:
        nus0 = np.zeros(0)

    prob = _CssProblem(x, k, p, q, nus0, free, include_mean, truncation, burn)
    bounds = prob.bounds
    first = np.concatenate((np.zeros(p + q), np.full(k, 0.1), nus0 if free else []))
    rng = np.random.default_rng(seed)
    starts = _optim.random_starts(rng, bounds, max(n_starts, 1), first=first)
    if free:
        # random starts only perturb frequencies locally so factors keep their identity
        for s in starts[1:]:
            s[p + q + k :] = np.clip(nus0 + rng.normal(0, 1e-3, k), -NU_BOUND, NU_BOUND)

    def objective(theta):
        css = prob.profile_css(theta)
        return math.log(css) if np.isfinite(css) and css > 0 else 1e6

    res = _optim.multistart_minimize(objective, bounds, starts, workers=workers)
    if not np.isfinite(res.fun) or res.fun >= 1e6:
        raise NumericalError("CSS minimization produced no admissible solution")
    if res.n_converged == 0:
        raise NumericalError(f"CSS minimization did not converge from any of {len(starts)} starts: {res.message}")

    theta = res.x
    ar, ma, ds, nus = prob.unpack(theta)
    if free and k > 1 and np.any(np.diff(np.sort(nus)) <= 1e-6):
        raise NumericalError("Gegenbauer frequencies collided during free search")
    mu, eps = prob.best_mu(theta)
    css = float(np.dot(eps, eps))
    n_obs = eps.size
    sigma2 = css / n_obs

    names = (["mu"] if include_mean else []) + prob.names()
    vec = np.concatenate(([mu] if include_mean else [], theta))
    try:
        H = _optim.numerical_hessian(prob.full_css, vec)
        ses = _optim.std_errors_from_hessian(H, scale=2 * sigma2)
    except (ValueError, FloatingPointError):
        ses = np.full(vec.size, np.nan)
    std_errors = {n: (None if not np.isfinite(s) else float(s)) for n, s in zip(names, ses)}

    factors = tuple(GegenbauerFactor(float(nu), float(d)) for nu, d in zip(nus, ds))
    return GarmaModel(
        mu=float(mu),
        ar=tuple(ar),
        ma=tuple(ma),
        factors=factors,
        sigma2=float(sigma2),
        truncation=truncation,
        fit=FitInfo(css, int(n_obs), bool(res.converged), std_errors, res.message),
    )


def css_objective(x, model: GarmaModel, burn: int = 0) -> float:
    eps = garma_apply_filter(x, model)[burn:]
    return float(np.dot(eps, eps))


def with_truncation(model: GarmaModel, truncation: int) -> GarmaModel:
    return replace(model, truncation=truncation)
