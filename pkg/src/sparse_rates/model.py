"""Channel and source parameters, pattern laws and the binary entropy.

All information quantities in the package are in nats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import optimize, special

from .errors import DomainError

__all__ = [
    "ChannelParams",
    "SparsityLaw",
    "binary_entropy",
    "memoryless_law",
    "prior_magnetization",
    "law_derivative",
    "db_to_linear",
    "linear_to_db",
]


def db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class ChannelParams:
    """Sparsity rate ``p``, active-component variance ``sigma2`` and sampling rate ``q``.

    The SNR is ``sigma2`` itself (power of an active component over the unit
    noise variance). ``p = 1`` is accepted and describes a dense source.
    """

    p: float
    sigma2: float
    q: float

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise DomainError(f"sparsity rate p must lie in (0, 1], got {self.p!r}")
        if not (self.sigma2 > 0.0 and math.isfinite(self.sigma2)):
            raise DomainError(f"sigma2 must be positive and finite, got {self.sigma2!r}")
        if not (0.0 < self.q <= 1.0):
            raise DomainError(f"sampling rate q must lie in (0, 1], got {self.q!r}")

    @classmethod
    def from_snr_db(cls, p: float, snr_db: float, q: float) -> "ChannelParams":
        return cls(p=p, sigma2=db_to_linear(snr_db), q=q)

    @property
    def snr_db(self) -> float:
        return linear_to_db(self.sigma2)

    def with_(self, **changes) -> "ChannelParams":
        return replace(self, **changes)


def binary_entropy(m) -> float:
    """Binary entropy in nats, with ``0 ln 0 = 0``."""
    arr = np.asarray(m, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"binary entropy is defined on [0, 1], got {m!r}")
    out = special.entr(arr) + special.entr(1.0 - arr)
    return float(out) if out.ndim == 0 else out


def _objective(coeffs, m):
    # H2(m) + f(m)
    return binary_entropy(m) + _poly_value(coeffs, m)


def _poly_value(coeffs, m):
    m = np.asarray(m, dtype=float)
    total = np.zeros_like(m)
    for k, a in enumerate(coeffs, start=1):
        total = total + a * m**k / k
    return total


def _poly_derivative(coeffs, m):
    m = np.asarray(m, dtype=float)
    total = np.zeros_like(m)
    for k, a in enumerate(coeffs, start=1):
        total = total + a * m ** (k - 1)
    return total


def _poly_second_derivative(coeffs, m):
    m = np.asarray(m, dtype=float)
    total = np.zeros_like(m)
    for k, a in enumerate(coeffs, start=1):
        if k >= 2:
            total = total + a * (k - 1) * m ** (k - 2)
    return total


@dataclass(frozen=True)
class SparsityLaw:
    """Pattern exponent ``f(m) = sum_k coeffs[k-1] * m**k / k`` on ``[0, 1]``.

    ``Pr(S)`` is proportional to ``exp(n f(m_s))``; adding a constant to ``f``
    cancels in the normalisation, so no sign constraint is imposed on ``f``.
    ``m_a`` is computed on construction unless supplied.
    """

    coeffs: tuple[float, ...]
    m_a: float = field(default=float("nan"))

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs or not all(math.isfinite(c) for c in coeffs):
            raise DomainError(f"pattern law needs finite coefficients, got {self.coeffs!r}")
        object.__setattr__(self, "coeffs", coeffs)
        if math.isnan(self.m_a):
            object.__setattr__(self, "m_a", _maximize_prior(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def is_memoryless(self) -> bool:
        return all(c == 0.0 for c in self.coeffs[1:])

    def value(self, m):
        out = _poly_value(self.coeffs, m)
        return float(out) if out.ndim == 0 else out

    def derivative(self, m):
        out = _poly_derivative(self.coeffs, m)
        return float(out) if out.ndim == 0 else out

    def second_derivative(self, m):
        out = _poly_second_derivative(self.coeffs, m)
        return float(out) if out.ndim == 0 else out


def law_derivative(law: SparsityLaw, m: float) -> float:
    return law.derivative(m)


def memoryless_law(p: float) -> SparsityLaw:
    """Linear law ``f(m) = m ln(p / (1 - p))`` of an i.i.d. Bernoulli(p) pattern."""
    if not (0.0 < p < 1.0):
        raise DomainError(f"memoryless law needs 0 < p < 1, got {p!r}")
    return SparsityLaw(coeffs=(math.log(p) - math.log1p(-p),), m_a=float(p))


_EDGE = 1e-15


def _stationarity(coeffs, m):
    # d/dm [H2(m) + f(m)]
    return math.log1p(-m) - math.log(m) + float(_poly_derivative(coeffs, m))


def _maximize_prior(coeffs: Sequence[float], step: float = 1e-3) -> float:
    grid = np.concatenate(([_EDGE], np.arange(step, 1.0 - step / 2, step), [1.0 - _EDGE]))
    slope = np.log1p(-grid) - np.log(grid) + _poly_derivative(coeffs, grid)
    # the slope is +inf at 0 and -inf at 1, so at least one +/- crossing exists
    candidates = []
    for i in np.flatnonzero((slope[:-1] > 0) & (slope[1:] <= 0)):
        lo, hi = grid[i], grid[i + 1]
        if slope[i + 1] == 0.0:
            candidates.append(float(hi))
            continue
        root = optimize.brentq(lambda m: _stationarity(coeffs, m), lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
        candidates.append(root)
    best = max(candidates, key=lambda m: (float(_objective(coeffs, m)), -m))
    return float(best)


def prior_magnetization(law: SparsityLaw) -> float:
    """Maximiser of ``H2(m) + f(m)`` over ``[0, 1]``; ties go to the smaller m."""
    return law.m_a
