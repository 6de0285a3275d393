"""Closed-form I2 through the Marchenko-Pastur function F(x, y).

``i2_logdet`` is the closed-form limit of ``(1/n) ln det(I + sigma2 H_S^T A^T A H_S)``.
The mutual information of the real-valued channel is half of it; that is
what :func:`i2` reports (the Monte-Carlo log-determinant oracle agrees with
the half, not with the full expression).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .model import ChannelParams

__all__ = ["I2Report", "f_mp", "i2", "i2_logdet", "i2_high_snr"]


def f_mp(x: float, y: float) -> float:
    """``(sqrt(x (1 + sqrt y)^2 + 1) - sqrt(x (1 - sqrt y)^2 + 1))^2``."""
    if x < 0 or y < 0 or math.isnan(x) or math.isnan(y):
        raise DomainError(f"F(x, y) needs x, y >= 0, got ({x!r}, {y!r})")
    ry = math.sqrt(y)
    upper = math.sqrt(x * (1.0 + ry) ** 2 + 1.0)
    lower = math.sqrt(x * (1.0 - ry) ** 2 + 1.0)
    # difference of the radicands is 4 x sqrt(y); avoids cancellation for small x
    diff = 4.0 * x * ry / (upper + lower)
    return diff * diff


@dataclass(frozen=True)
class I2Report:
    i2: float
    f_value: float
    prelog: float
    logdet: float


def i2_logdet(params: ChannelParams) -> float:
    """``p ln[1 + q s - F/4] + q ln[1 + p s - F/4] - F / (4 s)`` with ``F = F(q s, p/q)``."""
    p, s2, q = params.p, params.sigma2, params.q
    F = f_mp(q * s2, p / q)
    a1 = 1.0 + q * s2 - 0.25 * F
    a2 = 1.0 + p * s2 - 0.25 * F
    if a1 <= 0.0 or a2 <= 0.0:
        raise DomainError(f"log argument not positive for {params}")
    return max(p * math.log(a1) + q * math.log(a2) - F / (4.0 * s2), 0.0)


def i2(params: ChannelParams) -> I2Report:
    logdet = i2_logdet(params)
    return I2Report(
        i2=0.5 * logdet,
        f_value=f_mp(params.q * params.sigma2, params.p / params.q),
        prelog=min(params.q, params.p),
        logdet=logdet,
    )


def i2_high_snr(params: ChannelParams, logdet: bool = False) -> float:
    """Leading high-SNR term ``d ln(1 + 4 d sigma2)``, ``d = min(q, p)``, halved unless ``logdet``."""
    d = min(params.q, params.p)
    value = d * math.log1p(4.0 * d * params.sigma2)
    return value if logdet else 0.5 * value
