"""Saddle-point formula for I1 with a general pattern law.

Auxiliary functions of the support fraction ``x``::

    b   root in (0, 1] of  sigma2 x b^2 + (1 + sigma2 (q - x)) b - 1 = 0
    g   1 + sigma2 x b
    Ib  (q / x) ln g - ln b - sigma2 q b / g
    V   sigma2^2 b^2 x^2 / (2 g^2)
    L   sigma2 b / (2 g^2)
    t   f(x) - (x / 2) Ib + V (m_a q sigma2 + q)

``Q`` is a two-component Gaussian mixture (variances ``P_y`` and
``P_y + q^2 sigma2``, weights ``1 - m_a`` and ``m_a``). The saddle point
``(m, gamma)`` solves::

    gamma = -E[K Q^2] L'(m) - t'(m)
    m     = E[K],     K = logistic(L(m) Q^2 - gamma)

and the solution with the largest ``t(m) + h(gamma, m)`` is selected, where
``h = gamma (m - 1/2) + E[L Q^2 / 2 + ln 2cosh((L Q^2 - gamma) / 2)]``.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize, special

from .errors import ConvergenceError, DomainError
from .model import ChannelParams, SparsityLaw, binary_entropy

__all__ = [
    "AuxValues",
    "QMixture",
    "SaddlePoint",
    "RigorousSolution",
    "aux_values",
    "t_func",
    "t_prime",
    "q_expectation",
    "h_value",
    "solve_gamma",
    "saddle_residuals",
    "solve_saddle",
    "selection_criterion",
    "rigorous_solution",
    "i1_rigorous",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = 24
_TAIL = 13.0
_SD_STEPS = np.array([0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.5, 11.0, _TAIL])
_TRANSITION_STEPS = np.array([0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0])


@dataclass(frozen=True)
class AuxValues:
    x: float
    b: float
    g: float
    ibar: float
    v: float
    l: float
    b_prime: float
    g_prime: float
    l_prime: float
    v_prime: float
    # d/dx [x Ib(x)] = -ln b(x)
    x_ibar_prime: float


def _b_root(x, s2, q):
    a = 1.0 + s2 * (q - x)
    disc = a * a + 4.0 * s2 * x
    # rationalised root, stable for x -> 0 and for a < 0
    if a >= 0:
        return 2.0 / (a + math.sqrt(disc))
    return (math.sqrt(disc) - a) / (2.0 * s2 * x)


def aux_values(x: float, params: ChannelParams) -> AuxValues:
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"auxiliary functions are defined on [0, 1], got {x!r}")
    s2, q = params.sigma2, params.q
    b = _b_root(x, s2, q)
    u = s2 * x * b
    g = 1.0 + u
    # (q / x) ln g = q s2 b * log1p(u) / u
    log_ratio = math.log1p(u) / u if u > 1e-12 else 1.0 - 0.5 * u
    ibar = q * s2 * b * log_ratio - math.log(b) - s2 * q * b / g
    v = 0.5 * (u / g) ** 2
    l = s2 * b / (2.0 * g * g)
    b_prime = s2 * b * (1.0 - b) / (2.0 * s2 * x * b + 1.0 + s2 * (q - x))
    g_prime = s2 * (b + x * b_prime)
    l_prime = s2 * (b_prime * g - 2.0 * b * g_prime) / (2.0 * g**3)
    v_prime = (u / g) * g_prime / (g * g)
    return AuxValues(x, b, g, ibar, v, l, b_prime, g_prime, l_prime, v_prime, -math.log(b))


def _power(params: ChannelParams, law: SparsityLaw) -> float:
    return law.m_a * params.q * params.sigma2 + params.q


def t_func(x: float, params: ChannelParams, law: SparsityLaw) -> float:
    aux = aux_values(x, params)
    return law.value(x) - 0.5 * x * aux.ibar + aux.v * _power(params, law)


def t_prime(x: float, params: ChannelParams, law: SparsityLaw) -> float:
    aux = aux_values(x, params)
    # f' - Ib/2 - (x/2) Ib' = f' - (1/2) d/dx[x Ib]
    return law.derivative(x) - 0.5 * aux.x_ibar_prime + aux.v_prime * _power(params, law)


@dataclass(frozen=True)
class QMixture:
    """Law of Q: ``(1 - m_a) N(0, p_y) + m_a N(0, var2)``.

    Expectations of even integrands are computed on the half line with a
    composite Gauss-Legendre rule of ``order`` nodes per panel; panels are
    refined around ``Q^2 = center`` where the logistic factor switches.
    """

    m_a: float
    p_y: float
    var2: float
    weight: float
    order: int = DEFAULT_ORDER

    @classmethod
    def build(cls, params: ChannelParams, law: SparsityLaw, order: int = DEFAULT_ORDER) -> "QMixture":
        if order < 2:
            raise DomainError(f"quadrature order must be >= 2, got {order!r}")
        m_a = law.m_a
        p_y = m_a * params.sigma2 * params.q + params.q
        var2 = p_y + params.q**2 * params.sigma2
        return cls(m_a=m_a, p_y=p_y, var2=var2, weight=m_a, order=int(order))

    def nodes(self, center: float | None = None, width: float | None = None):
        """``(q2, w)`` with ``sum(w * f(q2)) ~= E[f(Q^2)]``."""
        gx, gw = _legendre(self.order)
        sds = (math.sqrt(self.p_y), math.sqrt(self.var2))
        edges = [np.zeros(1), sds[0] * _SD_STEPS, sds[1] * _SD_STEPS]
        if center is not None and center > 0.0 and width is not None and width > 0.0:
            q_star = math.sqrt(center)
            edges.append(q_star + width * _TRANSITION_STEPS)
            edges.append(q_star - width * _TRANSITION_STEPS)
        edges = np.unique(np.concatenate(edges))
        edges = edges[(edges >= 0.0) & (edges <= _TAIL * sds[1])]
        lo, hi = edges[:-1], edges[1:]
        half = 0.5 * (hi - lo)
        qs = (lo[:, None] + half[:, None] * (gx[None, :] + 1.0)).ravel()
        ws = (half[:, None] * gw[None, :]).ravel()
        dens = (1.0 - self.m_a) * _half_normal(qs, self.p_y) + self.m_a * _half_normal(qs, self.var2)
        return qs * qs, ws * dens

    def expect(self, fn, center: float | None = None, width: float | None = None) -> float:
        q2, w = self.nodes(center, width)
        return float(w @ fn(q2))


def _half_normal(x, var):
    return 2.0 * np.exp(-0.5 * x * x / var) / math.sqrt(2.0 * math.pi * var)


@lru_cache(maxsize=None)
def _legendre(order: int):
    return leggauss(order)


def _switch(l: float, gamma: float):
    """Centre (in Q^2) and width (in Q) of the logistic transition of K."""
    if l <= 0.0 or gamma <= 0.0:
        return None, None
    q_star = math.sqrt(gamma / l)
    return gamma / l, 1.0 / (2.0 * l * q_star)


Kind = Literal["K", "KQ2Lp", "h", "criterion"]


def _integrand(kind: str, gamma: float, aux: AuxValues):
    l = aux.l
    if kind == "K":
        return lambda q2: special.expit(l * q2 - gamma)
    if kind == "KQ2Lp":
        return lambda q2: special.expit(l * q2 - gamma) * q2 * aux.l_prime
    if kind in ("h", "criterion"):
        return lambda q2: 0.5 * l * q2 + np.logaddexp(0.5 * (l * q2 - gamma), -0.5 * (l * q2 - gamma))
    raise DomainError(f"unknown integrand kind {kind!r}")


def q_expectation(kind: Kind, m: float, gamma: float, mix: QMixture, params: ChannelParams) -> float:
    """Mixture expectation of one of the saddle-point integrands.

    ``K``: logistic(L(m) Q^2 - gamma); ``KQ2Lp``: K Q^2 L'(m);
    ``h`` / ``criterion``: L(m) Q^2 / 2 + ln 2cosh((L(m) Q^2 - gamma) / 2).
    """
    aux = aux_values(m, params)
    return mix.expect(_integrand(kind, gamma, aux), *_switch(aux.l, gamma))


def h_value(gamma: float, m: float, mix: QMixture, params: ChannelParams) -> float:
    return gamma * (m - 0.5) + q_expectation("h", m, gamma, mix, params)


def _gamma_defect(gamma, aux, tp, mix):
    k_q2 = mix.expect(lambda q2: special.expit(aux.l * q2 - gamma) * q2, *_switch(aux.l, gamma))
    return gamma + aux.l_prime * k_q2 + tp


def solve_gamma(m: float, params: ChannelParams, law: SparsityLaw, mix: QMixture) -> float:
    """Root in gamma of ``gamma + L'(m) E[K Q^2] + t'(m) = 0`` at fixed m."""
    aux = aux_values(m, params)
    tp = t_prime(m, params, law)
    second_moment = (1.0 - mix.m_a) * mix.p_y + mix.m_a * mix.var2
    span = aux.l_prime * second_moment
    lo, hi = -tp - max(span, 0.0), -tp - min(span, 0.0)
    if lo == hi:
        return lo
    pad = 1e-9 * max(1.0, abs(lo), abs(hi))
    return optimize.brentq(_gamma_defect, lo - pad, hi + pad, args=(aux, tp, mix), xtol=1e-14, rtol=1e-15, maxiter=500)


@dataclass(frozen=True)
class SaddlePoint:
    m_circ: float
    gamma_circ: float
    criterion: float
    residuals: tuple[float, float]


def saddle_residuals(m: float, gamma: float, params: ChannelParams, law: SparsityLaw, mix: QMixture) -> tuple[float, float]:
    """Defects of the gamma equation and of the magnetisation equation."""
    aux = aux_values(m, params)
    r_gamma = _gamma_defect(gamma, aux, t_prime(m, params, law), mix)
    r_m = m - q_expectation("K", m, gamma, mix, params)
    return abs(r_gamma), abs(r_m)


def _criterion(m, gamma, params, law, mix):
    return t_func(m, params, law) + h_value(gamma, m, mix, params)


def selection_criterion(sp: SaddlePoint, params: ChannelParams, law: SparsityLaw, order: int = DEFAULT_ORDER) -> float:
    """``t(m) + (m - 1/2) gamma + E[L Q^2 / 2 + ln 2cosh((L Q^2 - gamma) / 2)]``."""
    mix = QMixture.build(params, law, order)
    return _criterion(sp.m_circ, sp.gamma_circ, params, law, mix)


def solve_saddle(
    params: ChannelParams,
    law: SparsityLaw,
    n_starts: int = 16,
    damping: float = 0.3,
    max_iter: int = 20_000,
    tol: float = 1e-13,
    dedup_atol: float = 1e-6,
    order: int = DEFAULT_ORDER,
) -> list[SaddlePoint]:
    """Distinct saddle points reached by damped alternation from ``n_starts`` m-starts.

    Each sweep solves the gamma equation exactly at the current m and then
    relaxes m towards ``E[K]``. Sorted by ``m_circ``.
    """
    mix = QMixture.build(params, law, order)
    found = []
    for m in (np.arange(n_starts) + 0.5) / n_starts:
        m = float(m)
        for _ in range(max_iter):
            gamma = solve_gamma(m, params, law, mix)
            target = q_expectation("K", m, gamma, mix, params)
            if abs(target - m) <= tol:
                found.append((target, solve_gamma(target, params, law, mix)))
                break
            m = min(max((1.0 - damping) * m + damping * target, 0.0), 1.0)
    if not found:
        raise ConvergenceError(f"saddle-point alternation did not converge for {params}")
    found.sort()
    distinct: list[tuple[float, float]] = []
    for m, gamma in found:
        if distinct and abs(m - distinct[-1][0]) <= dedup_atol and abs(gamma - distinct[-1][1]) <= dedup_atol:
            continue
        distinct.append((m, gamma))
    return [
        SaddlePoint(m, gamma, _criterion(m, gamma, params, law, mix), saddle_residuals(m, gamma, params, law, mix))
        for m, gamma in distinct
    ]


@dataclass(frozen=True)
class RigorousSolution:
    i1: float
    selected: SaddlePoint
    saddle_points: tuple[SaddlePoint, ...]


def rigorous_solution(params: ChannelParams, law: SparsityLaw, **solver_options) -> RigorousSolution:
    """Solve the saddle system and evaluate I1 at the largest-criterion solution."""
    points = solve_saddle(params, law, **solver_options)
    best = max(points, key=lambda sp: (sp.criterion, -sp.m_circ))
    m_a = law.m_a
    i1 = 0.5 * params.sigma2 * m_a * params.q + binary_entropy(m_a) + law.value(m_a) - best.criterion
    return RigorousSolution(i1=i1, selected=best, saddle_points=tuple(points))


def i1_rigorous(params: ChannelParams, law: SparsityLaw, **solver_options) -> float:
    return rigorous_solution(params, law, **solver_options).i1
