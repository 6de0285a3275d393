"""Achievable rates built from I1, I2 and binary entropies.

Every rate is a small composition of the per-symbol quantities. Negative raw
values are reported as zero with ``clamped`` set; the raw value is kept.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import ConvergenceError, DomainError, SparseRatesError
from .model import ChannelParams, SparsityLaw, binary_entropy, memoryless_law
from .replica import i1_replica
from .rigorous import i1_rigorous
from .shannon_transform import i2

__all__ = [
    "Scenario",
    "RateReport",
    "WiretapParams",
    "OptimalityScan",
    "Route",
    "i1",
    "rate_controlled",
    "rate_unknown_pattern",
    "rate_causal_state",
    "rate_pattern_info",
    "secrecy_controlled",
    "secrecy_unavailable",
    "secrecy_uncontrolled",
    "mac_rate",
    "constrained_law",
    "memoryless_optimality_scan",
]

Route = Literal["auto", "replica", "rigorous"]


class Scenario(str, enum.Enum):
    CONTROLLED = "controlled"
    UNKNOWN_PATTERN = "unknown"
    CAUSAL_STATE = "causal-state"
    PATTERN_INFO = "pattern-info"
    WIRETAP_CONTROLLED = "wiretap-controlled"
    WIRETAP_UNAVAILABLE = "wiretap-unavailable"
    WIRETAP_UNCONTROLLED = "wiretap-uncontrolled"
    MAC = "mac"


@dataclass(frozen=True)
class RateReport:
    scenario: Scenario
    rate: float
    ingredients: dict = field(compare=False)
    clamped: bool
    raw: float


@dataclass(frozen=True)
class WiretapParams:
    """Legitimate channel ``base`` (its ``q`` is q1) and eavesdropper sampling rate ``q2``."""

    base: ChannelParams
    q2: float

    def __post_init__(self):
        if not (0.0 < self.q2 <= self.base.q):
            raise DomainError(f"wiretap pair needs q1 >= q2 > 0, got q1={self.base.q!r}, q2={self.q2!r}")

    @property
    def legitimate(self) -> ChannelParams:
        return self.base

    @property
    def eavesdropper(self) -> ChannelParams:
        return self.base.with_(q=self.q2)


def _report(scenario, raw, **ingredients) -> RateReport:
    raw = float(raw)
    if not math.isfinite(raw):
        raise SparseRatesError(f"non-finite rate for {scenario.value}: {raw!r}")
    clamped = raw < 0.0
    ingredients["raw"] = raw
    return RateReport(scenario, 0.0 if clamped else raw, ingredients, clamped, raw)


def _law(params: ChannelParams, law: SparsityLaw | None) -> SparsityLaw:
    if law is not None:
        return law
    if params.p >= 1.0:
        # fully dense pattern: a single support, f is irrelevant
        return SparsityLaw(coeffs=(0.0,), m_a=1.0)
    return memoryless_law(params.p)


def _require_memoryless(params, law, what):
    if not law.is_memoryless or abs(law.m_a - params.p) > 1e-9:
        raise DomainError(f"{what} needs the memoryless law with m_a = p = {params.p!r}")


@lru_cache(maxsize=4096)
def _i1_cached(params: ChannelParams, law: SparsityLaw, route: str) -> float:
    if route == "auto":
        route = "replica" if law.is_memoryless and abs(law.m_a - params.p) <= 1e-9 else "rigorous"
    if route == "replica":
        _require_memoryless(params, law, "the replica route")
        return i1_replica(params)
    if route == "rigorous":
        if law.m_a >= 1.0:
            # no pattern uncertainty: I1 is the Gaussian log-determinant rate
            return i2(params).i2
        return i1_rigorous(params, law)
    raise DomainError(f"unknown I1 route {route!r}")


def i1(params: ChannelParams, law: SparsityLaw | None = None, route: Route = "auto") -> float:
    """I1 in nats through the chosen route.

    ``auto`` uses the replica fixed point for the memoryless law and the
    saddle-point formula for every other law.
    """
    return _i1_cached(params, _law(params, law), route)


def rate_controlled(params: ChannelParams, law: SparsityLaw | None = None, route: Route = "auto") -> RateReport:
    value = i1(params, law, route)
    return _report(Scenario.CONTROLLED, value, i1=value)


def rate_unknown_pattern(params: ChannelParams, law: SparsityLaw | None = None, route: Route = "auto") -> RateReport:
    law = _law(params, law)
    value = i1(params, law, route)
    h2 = binary_entropy(law.m_a)
    return _report(Scenario.UNKNOWN_PATTERN, value - h2, i1=value, h2=h2)


def rate_causal_state(params: ChannelParams, route: Route = "replica") -> RateReport:
    """Pattern known causally at the encoder: power ``sigma2 / p`` on the active entries.

    The Bernoulli weight stays ``p``; only the active variance is rescaled.
    """
    scaled = params.with_(sigma2=params.sigma2 / params.p)
    value = i1(scaled, None, route)
    h2 = binary_entropy(params.p)
    return _report(Scenario.CAUSAL_STATE, value - h2, i1_scaled=value, h2=h2, sigma2_scaled=scaled.sigma2)


def rate_pattern_info(params: ChannelParams, law: SparsityLaw | None = None, route: Route = "auto") -> RateReport:
    value = i1(params, law, route)
    second = i2(params).i2
    return _report(Scenario.PATTERN_INFO, value - second, i1=value, i2=second)


def secrecy_controlled(wp: WiretapParams, law: SparsityLaw | None = None, route: Route = "auto") -> RateReport:
    legit = i1(wp.legitimate, law, route)
    eaves = i1(wp.eavesdropper, law, route)
    return _report(Scenario.WIRETAP_CONTROLLED, legit - eaves, i1=legit, i1_eavesdropper=eaves)


def secrecy_unavailable(wp: WiretapParams, law: SparsityLaw | None = None, route: Route = "auto") -> RateReport:
    legit = i1(wp.legitimate, law, route)
    eaves = i2(wp.eavesdropper).i2
    h2 = binary_entropy(wp.base.p)
    return _report(Scenario.WIRETAP_UNAVAILABLE, legit - eaves - h2, i1=legit, i2_eavesdropper=eaves, h2=h2)


def secrecy_uncontrolled(wp: WiretapParams, law: SparsityLaw | None = None, route: Route = "auto") -> RateReport:
    law = _law(wp.base, law)
    if wp.base.p < 1.0:
        _require_memoryless(wp.base, law, "the uncontrolled-pattern secrecy rate")
    legit = i1(wp.legitimate, law, route)
    eaves = i1(wp.eavesdropper, law, route)
    h2 = binary_entropy(wp.base.p)
    return _report(Scenario.WIRETAP_UNCONTROLLED, legit - max(h2, eaves), i1=legit, i1_eavesdropper=eaves, h2=h2)


def mac_rate(params: ChannelParams, law: SparsityLaw | None = None, alpha: float = 0.0, route: Route = "auto") -> RateReport:
    """Symmetric sum-rate bound of ``n (1 - alpha)`` users: ``I1(p (1 - alpha)) / (1 - alpha)``."""
    if not (0.0 <= alpha < 1.0):
        raise DomainError(f"alpha must lie in [0, 1), got {alpha!r}")
    law = _law(params, law)
    if params.p < 1.0:
        _require_memoryless(params, law, "the multiple-access rate")
    p_eff = params.p * (1.0 - alpha)
    reduced = params.with_(p=p_eff)
    value = i1(reduced, _law(reduced, None), route)
    return _report(Scenario.MAC, value / (1.0 - alpha), i1=value, p_effective=p_eff)


def constrained_law(p: float, higher: np.ndarray) -> SparsityLaw | None:
    """Law with higher-order coefficients ``higher`` and ``alpha_1`` chosen so that ``f'(p) = ln(p / (1 - p))``.

    ``f'(p)`` is affine in ``alpha_1``, so the constraint is solved exactly.
    Returns None when ``p`` is a stationary point but not the global maximiser
    of ``H2 + f`` (the law then concentrates on a different magnetisation).
    """
    higher = [float(a) for a in higher]
    if not any(higher):
        return memoryless_law(p)
    rest = sum(a * p ** k for k, a in enumerate(higher, start=1))
    alpha1 = math.log(p) - math.log1p(-p) - rest
    law = SparsityLaw(coeffs=(alpha1, *higher))
    if abs(law.m_a - p) > 1e-9:
        return None
    return law


@dataclass(frozen=True)
class OptimalityScan:
    gap: float
    memoryless: float
    values: tuple[float, ...]
    laws: tuple[SparsityLaw, ...]
    skipped: int
    rejected: int


def memoryless_optimality_scan(
    params: ChannelParams,
    degree: int,
    n_laws: int,
    seed: int = 0,
    q2: float | None = None,
    scale: float = 1.0,
    max_draws: int | None = None,
) -> OptimalityScan:
    """Random polynomial laws sharing ``m_a = p``, compared against the memoryless law.

    The compared quantity is I1 (or ``I1(q1) - I1(q2)`` when ``q2`` is given), all
    laws evaluated through the saddle-point route. ``gap`` is the largest
    law value minus the memoryless value. Laws whose prior maximiser moves
    away from ``p`` are redrawn (``rejected``); solver failures are counted
    in ``skipped``.
    """
    if degree < 1:
        raise DomainError(f"degree must be >= 1, got {degree!r}")
    if n_laws < 1:
        raise DomainError(f"n_laws must be >= 1, got {n_laws!r}")
    wp = WiretapParams(params, q2) if q2 is not None else None

    def value(law):
        if wp is None:
            return i1(params, law, "rigorous")
        return i1(wp.legitimate, law, "rigorous") - i1(wp.eavesdropper, law, "rigorous")

    reference = value(memoryless_law(params.p))
    rng = np.random.default_rng(seed)
    max_draws = 20 * n_laws if max_draws is None else max_draws
    laws, values = [], []
    skipped = rejected = draws = 0
    while len(laws) + skipped < n_laws and draws < max_draws:
        draws += 1
        law = constrained_law(params.p, scale * rng.standard_normal(degree - 1))
        if law is None:
            rejected += 1
            continue
        try:
            values.append(value(law))
        except (ConvergenceError, DomainError, ArithmeticError, ValueError):
            skipped += 1
            continue
        laws.append(law)
    gap = max(values) - reference if values else float("nan")
    return OptimalityScan(gap, reference, tuple(values), tuple(laws), skipped, rejected)
