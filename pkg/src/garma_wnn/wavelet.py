"""Daubechies filter banks, MODWT and additive multiresolution analysis.

Conventions follow Percival & Walden (2000): ``h`` is the wavelet
(high-pass) filter, ``g`` the scaling (low-pass) filter, related by
``g_l = (-1)**(l+1) * h_{L-1-l}``. The MODWT uses circular boundaries, so
reconstruction is exact and the transform commutes with circular shifts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

# Scaling filters, from a 40-digit spectral factorization of the Daubechies
# product filter (minimum phase for D, least asymmetric root choice for LA).
_SCALING = {
    ("haar", 2): np.array([1.0, 1.0]) / np.sqrt(2.0),
    ("d", 4): np.array([1 + np.sqrt(3), 3 + np.sqrt(3), 3 - np.sqrt(3), 1 - np.sqrt(3)])
    / (4 * np.sqrt(2.0)),
    ("d", 8): np.array([
        0.23037781330889650086, 0.71484657055291564709,
        0.63088076792985890788, -0.027983769416859854211,
        -0.18703481171909308408, 0.030841381835560763627,
        0.032883011666885199735, -0.010597401785069032105,
    ]),
    ("la", 8): np.array([
        -0.075765714789502213228, -0.029635527646002491764,
        0.49761866763277498998, 0.80373875180513208088,
        0.2978577956053060514, -0.099219543576633532585,
        -0.012603967262031303754, 0.032223100604051467872,
    ]),
}

_ALIASES = {
    "haar": ("haar", 2),
    "d4": ("d", 4),
    "d8": ("d", 8),
    "la8": ("la", 8),
}


@dataclass(frozen=True)
class WaveletFilter:
    family: str
    L: int
    h: np.ndarray
    g: np.ndarray

    @property
    def name(self) -> str:
        return "haar" if self.family == "haar" else f"{self.family}{self.L}"


def make_filter(family: str, L: Optional[int] = None) -> WaveletFilter:
    """Build a filter pair, e.g. ``make_filter("la", 8)`` or ``make_filter("la8")``."""
    key = family.lower()
    if L is None:
        if key not in _ALIASES:
            raise ValueError(f"unsupported wavelet filter {family!r}")
        key, L = _ALIASES[key]
    key = {"extremalphase": "d", "leastasymmetric": "la", "sym": "la"}.get(key, key)
    if (key, L) not in _SCALING:
        supported = ", ".join(sorted(_ALIASES))
        raise ValueError(f"unsupported filter ({family}, {L}); supported: {supported}")
    g = _SCALING[(key, L)].copy()
    # invert the QMF relation to get the wavelet filter
    h = np.array([(-1) ** l * g[L - 1 - l] for l in range(L)])
    h.setflags(write=False)
    g.setflags(write=False)
    return WaveletFilter(key, L, h, g)


def max_level(T: int, L: int) -> int:
    """Largest J with ``J <= log2(T/(L-1) + 1)``, i.e. ``(2**J - 1)(L - 1) <= T``."""
    if T < L:
        raise ValueError(f"series length {T} shorter than filter width {L}")
    J = 0
    while ((2 ** (J + 1)) - 1) * (L - 1) <= T:
        J += 1
    return J


@dataclass(frozen=True)
class ModwtDecomposition:
    """J band sequences plus one low-pass sequence, all of the input length.

    ``form == "coefficients"``: ``details`` are the wavelet coefficients
    W_1..W_J and ``smooth`` the scaling coefficients V_J.
    ``form == "mra"``: ``details`` are D_1..D_J and ``smooth`` is S_J, with
    ``details.sum(0) + smooth`` equal to the original series.
    """

    filter: WaveletFilter
    J: int
    details: np.ndarray
    smooth: np.ndarray
    form: str = "coefficients"

    def components(self) -> dict[str, np.ndarray]:
        out = {f"D{j + 1}": self.details[j] for j in range(self.J)}
        out[f"S{self.J}"] = self.smooth
        return out


def _check(x, J):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("MODWT needs a non-empty 1-D series")
    if J < 1:
        raise ValueError("number of levels must be >= 1")
    return x


def _forward_step(v, filt, j):
    """One pyramid stage: (W_j, V_j) from V_{j-1}, circular filtering."""
    ht = filt.h / np.sqrt(2.0)
    gt = filt.g / np.sqrt(2.0)
    stride = 2 ** (j - 1)
    w = np.zeros_like(v)
    vn = np.zeros_like(v)
    for l in range(filt.L):
        shifted = np.roll(v, l * stride)  # v[(t - stride*l) mod N]
        w += ht[l] * shifted
        vn += gt[l] * shifted
    return w, vn


def _inverse_step(w, v, filt, j):
    ht = filt.h / np.sqrt(2.0)
    gt = filt.g / np.sqrt(2.0)
    stride = 2 ** (j - 1)
    out = np.zeros_like(v)
    for l in range(filt.L):
        out += ht[l] * np.roll(w, -l * stride) + gt[l] * np.roll(v, -l * stride)
    return out


def modwt(x, filt: WaveletFilter, J: int) -> ModwtDecomposition:
    x = _check(x, J)
    if x.size >= filt.L and J > max_level(x.size, filt.L):
        warnings.warn(
            f"J={J} exceeds the recommended maximum level "
            f"{max_level(x.size, filt.L)} for N={x.size}; boundary coefficients dominate",
            stacklevel=2,
        )
    v = x.copy()
    ws = np.empty((J, x.size))
    for j in range(1, J + 1):
        ws[j - 1], v = _forward_step(v, filt, j)
    return ModwtDecomposition(filt, J, ws, v, "coefficients")


def imodwt(dec: ModwtDecomposition) -> np.ndarray:
    if dec.form != "coefficients":
        raise ValueError("imodwt expects coefficient form; MRA components simply add up")
    details = np.asarray(dec.details, dtype=float)
    smooth = np.asarray(dec.smooth, dtype=float)
    if details.ndim != 2 or details.shape[0] != dec.J or details.shape[1] != smooth.size:
        raise ValueError(
            f"malformed decomposition: details {details.shape}, smooth {smooth.shape}, J={dec.J}"
        )
    v = smooth
    for j in range(dec.J, 0, -1):
        v = _inverse_step(details[j - 1], v, dec.filter, j)
    return v


def to_mra(dec: ModwtDecomposition) -> ModwtDecomposition:
    """Convert coefficient form to detail/smooth form.

    D_j is the inverse transform with every level except W_j zeroed; S_J
    keeps only V_J.
    """
    if dec.form == "mra":
        return dec
    N = dec.smooth.size
    zeros = np.zeros(N)
    details = np.empty((dec.J, N))
    for j in range(1, dec.J + 1):
        v = _inverse_step(dec.details[j - 1], zeros, dec.filter, j)
        for i in range(j - 1, 0, -1):
            v = _inverse_step(zeros, v, dec.filter, i)
        details[j - 1] = v
    s = dec.smooth
    for i in range(dec.J, 0, -1):
        s = _inverse_step(zeros, s, dec.filter, i)
    return ModwtDecomposition(dec.filter, dec.J, details, s, "mra")


def mra(x, filt: WaveletFilter, J: int) -> ModwtDecomposition:
    return to_mra(modwt(x, filt, J))
