"""Replica-symmetric fixed point for the per-symbol mutual information I1.

The effective SNR ``eta`` of the decoupled scalar channel solves
``eta = q / (1 + mmse(eta))``, and

    I1 = I(V; V + eta^{-1/2} Z) + (1/2) [q ln(q / eta) + eta - q].

The factor 1/2 on the bracket is the real-valued normalisation; it is what
makes the expression coincide with the Gaussian log-determinant at p = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .model import ChannelParams
from .scalar_channel import ScalarChannel, scalar_mi, scalar_mmse

__all__ = ["ReplicaSolution", "solve_eta", "i1_replica", "replica_solution", "fixed_point_defect"]


@dataclass(frozen=True)
class ReplicaSolution:
    eta: float
    i1: float
    residual: float


def _mmse(params: ChannelParams, eta: float) -> float:
    return scalar_mmse(ScalarChannel(params.p, params.sigma2, eta))


def fixed_point_defect(params: ChannelParams, eta: float) -> float:
    """``1/eta - (1 + mmse(eta)) / q``; zero exactly at a fixed point."""
    return 1.0 / eta - (1.0 + _mmse(params, eta)) / params.q


def replica_value(params: ChannelParams, eta: float) -> float:
    q = params.q
    mi = scalar_mi(ScalarChannel(params.p, params.sigma2, eta))
    correction = 0.5 * (q * math.log(q / eta) + eta - q)
    return mi + correction


def _iterate(params, eta, damping, max_iter, tol):
    q = params.q
    for _ in range(max_iter):
        new = (1.0 - damping) * eta + damping * q / (1.0 + _mmse(params, eta))
        if abs(new - eta) <= tol * new:
            return new
        eta = new
    return None


def solve_eta(
    params: ChannelParams,
    n_starts: int = 32,
    damping: float = 0.5,
    dedup_rtol: float = 1e-6,
    max_iter: int = 10_000,
    tol: float = 1e-14,
) -> list[ReplicaSolution]:
    """All fixed points reached by damped iteration from log-spaced starts in (1e-6 q, q].

    Returned sorted by ``eta``.
    """
    q = params.q
    starts = np.logspace(math.log10(1e-6 * q), math.log10(q), n_starts)
    limits = [_iterate(params, float(e), damping, max_iter, tol) for e in starts]
    limits = sorted(e for e in limits if e is not None)
    if not limits:
        raise ConvergenceError(f"fixed-point iteration did not converge for {params}")
    distinct: list[float] = []
    for e in limits:
        if not distinct or abs(e - distinct[-1]) > dedup_rtol * distinct[-1]:
            distinct.append(e)
    return [
        ReplicaSolution(eta=e, i1=replica_value(params, e), residual=abs(fixed_point_defect(params, e)))
        for e in distinct
    ]


def replica_solution(params: ChannelParams, **solver_options) -> ReplicaSolution:
    """The fixed point with the smallest I1 (ties go to the smaller eta)."""
    solutions = solve_eta(params, **solver_options)
    return min(solutions, key=lambda s: (s.i1, s.eta))


def i1_replica(params: ChannelParams, **solver_options) -> float:
    return replica_solution(params, **solver_options).i1
