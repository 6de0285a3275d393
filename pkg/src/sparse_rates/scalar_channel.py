"""MMSE and mutual information of V = B X observed as V + eta^{-1/2} Z.

B ~ Bernoulli(p), X ~ N(0, sigma2), Z ~ N(0, 1). Expectations over the
two-component Gaussian mixture of the observation are evaluated with a
composite Gauss-Legendre rule on the half line whose panels are refined
around the point where the posterior odds of ``B = 1`` cross one; that
transition becomes very sharp at high SNR.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from .errors import DomainError
from .model import binary_entropy

__all__ = ["ScalarChannel", "scalar_mmse", "scalar_mi", "mixture_expectation"]

_GL_X, _GL_W = leggauss(24)
_TAIL = 13.0  # standard deviations; Gaussian tail mass beyond is < 1e-37
_SD_STEPS = np.array([0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.5, 11.0, _TAIL])
_TRANSITION_STEPS = np.array([0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0])


@dataclass(frozen=True)
class ScalarChannel:
    p: float
    sigma2: float
    eta: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise DomainError(f"p must lie in [0, 1], got {self.p!r}")
        if not (self.sigma2 >= 0.0 and math.isfinite(self.sigma2)):
            raise DomainError(f"sigma2 must be non-negative, got {self.sigma2!r}")
        if not (self.eta >= 0.0 and math.isfinite(self.eta)):
            raise DomainError(f"eta must be non-negative, got {self.eta!r}")


def _panel_nodes(ch: ScalarChannel):
    """Nodes/weights on [0, inf) and the log posterior odds at each node."""
    v0 = 1.0 / ch.eta
    v1 = ch.sigma2 + v0
    sd0, sd1 = math.sqrt(v0), math.sqrt(v1)
    # log odds of B = 1 given y: c + a * y**2 / 2
    a = 1.0 / v0 - 1.0 / v1
    c = math.log(ch.p) - math.log1p(-ch.p) + 0.5 * (math.log(v0) - math.log(v1))
    edges = [np.zeros(1), sd0 * _SD_STEPS, sd1 * _SD_STEPS]
    if c < 0.0 and a > 0.0:
        y_star = math.sqrt(-2.0 * c / a)
        width = 1.0 / (a * y_star)
        edges.append(y_star + width * _TRANSITION_STEPS)
        edges.append(y_star - width * _TRANSITION_STEPS)
    edges = np.unique(np.concatenate(edges))
    edges = edges[(edges >= 0.0) & (edges <= _TAIL * sd1)]
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    y = (lo[:, None] + half[:, None] * (_GL_X[None, :] + 1.0)).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    log_odds = c + 0.5 * a * y * y
    return y, w, v0, v1, log_odds


def _normal_pdf(y, var):
    return np.exp(-0.5 * y * y / var) / math.sqrt(2.0 * math.pi * var)


def mixture_expectation(ch: ScalarChannel, integrand) -> float:
    """E[integrand(y, log_odds)] over the observation law (integrand even in y)."""
    y, w, v0, v1, log_odds = _panel_nodes(ch)
    density = 2.0 * ((1.0 - ch.p) * _normal_pdf(y, v0) + ch.p * _normal_pdf(y, v1))
    return float(np.sum(w * density * integrand(y, log_odds)))


def scalar_mmse(ch: ScalarChannel) -> float:
    """E[Var(V | Y)], always in ``[0, p sigma2]``."""
    p, s2, eta = ch.p, ch.sigma2, ch.eta
    if p == 0.0 or s2 == 0.0:
        return 0.0
    if eta == 0.0:
        return p * s2
    if p == 1.0:
        return s2 / (1.0 + eta * s2)
    v0 = 1.0 / eta
    v1 = s2 + v0
    tau = s2 * v0 / v1
    gain = s2 / v1

    def posterior_variance(y, log_odds):
        pi = special.expit(log_odds)
        mean = gain * y
        return pi * tau + pi * (1.0 - pi) * mean * mean

    return min(max(mixture_expectation(ch, posterior_variance), 0.0), p * s2)


def scalar_mi(ch: ScalarChannel) -> float:
    """I(V; Y) in nats.

    Evaluated as ``H2(p) - E[h_b(Pr(B=1|Y))] + (p/2) ln(1 + eta sigma2)``,
    which equals ``h(Y) - (1/2) ln(2 pi e / eta)`` and needs no cancellation of
    large differential entropies.
    """
    p, s2, eta = ch.p, ch.sigma2, ch.eta
    if p == 0.0 or s2 == 0.0 or eta == 0.0:
        return 0.0
    if p == 1.0:
        return 0.5 * math.log1p(eta * s2)

    def posterior_entropy(y, log_odds):
        pi = special.expit(log_odds)
        return pi * np.logaddexp(0.0, -log_odds) + (1.0 - pi) * np.logaddexp(0.0, log_odds)

    pattern_info = binary_entropy(p) - mixture_expectation(ch, posterior_entropy)
    return max(pattern_info, 0.0) + 0.5 * p * math.log1p(eta * s2)
