"""Finite-n Monte-Carlo references for I1 and I2.

For a fixed channel ``(A, H)`` and Gaussian amplitudes, the evidence of a
support ``S`` is available in closed form, so ``-ln p(y | A, H)`` is a
log-sum-exp over all ``2^n`` supports. Averaging over instances gives I1 at
dimension ``n`` exactly up to Monte-Carlo error. I2 is the average Gaussian
log-determinant on the true support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special, stats

from ._parallel import ordered_map
from .errors import DomainError, NumericError, SizeError
from .model import ChannelParams, SparsityLaw

__all__ = [
    "Instance",
    "OracleEstimate",
    "sample_instance",
    "pattern_level_logpmf",
    "log_g",
    "mc_i1",
    "mc_i2",
    "MAX_ENUMERATION_N",
    "MAX_LOGDET_N",
]

MAX_ENUMERATION_N = 16
MAX_LOGDET_N = 1000


@dataclass(frozen=True)
class Instance:
    n: int
    s: np.ndarray
    u: np.ndarray
    x: np.ndarray
    a_mask: np.ndarray
    h: np.ndarray
    w: np.ndarray
    y: np.ndarray

    @property
    def k(self) -> int:
        return int(self.a_mask.sum())


@dataclass(frozen=True)
class OracleEstimate:
    mean: float
    std_err: float
    trials: int
    n: int


def pattern_level_logpmf(n: int, p: float, law: SparsityLaw | None = None) -> np.ndarray:
    """Log-probabilities of ``|S| = 0..n``.

    With ``law`` the pattern has ``Pr(S)`` proportional to ``exp(n f(|S|/n))``;
    without it the entries are i.i.d. Bernoulli(p).
    """
    j = np.arange(n + 1)
    if law is None:
        return stats.binom.logpmf(j, n, p)
    logw = special.gammaln(n + 1) - special.gammaln(j + 1) - special.gammaln(n - j + 1) + n * law.value(j / n)
    return logw - special.logsumexp(logw)


def _rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def sample_instance(n: int, params: ChannelParams, law: SparsityLaw | None = None, seed: int = 0, trial: int = 0) -> Instance:
    """One draw of ``(S, U, H, W)`` from the stream identified by ``(seed, trial)``.

    The support size is drawn from its exact law and the support is then a
    uniform subset of that size, which is exact for any magnetisation-only
    pattern law. ``A`` keeps the first ``round(q n)`` rows.
    """
    if n < 1:
        raise SizeError(f"n must be >= 1, got {n!r}")
    rng = _rng(seed, trial)
    levels = np.exp(pattern_level_logpmf(n, params.p, law))
    size = int(rng.choice(n + 1, p=levels / levels.sum()))
    s = np.zeros(n, dtype=bool)
    s[rng.permutation(n)[:size]] = True
    u = rng.normal(0.0, math.sqrt(params.sigma2), n)
    h = rng.normal(0.0, 1.0 / math.sqrt(n), (n, n))
    w = rng.normal(size=n)
    x = np.where(s, u, 0.0)
    a_mask = np.zeros(n, dtype=bool)
    a_mask[: round(params.q * n)] = True
    y = np.where(a_mask, h @ x, 0.0) + w
    return Instance(n=n, s=s, u=u, x=x, a_mask=a_mask, h=h, w=w, y=y)


def _cholesky(m):
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"evidence factorisation failed: {exc}") from None


def log_g(y, a_mask, h, support, sigma2: float) -> float:
    """Log evidence ratio of support ``support``.

    ``(1/2) b^T (G + I/sigma2)^{-1} b - (1/2) ln det(sigma2 G + I)`` with
    ``G = H_S^T A H_S`` and ``b = H_S^T A y``.
    """
    if not sigma2 > 0.0:
        raise NumericError(f"sigma2 must be positive, got {sigma2!r}")
    support = np.asarray(support)
    # boolean mask or index list
    idx = np.flatnonzero(support) if support.dtype == bool else support.astype(int).ravel()
    if idx.size == 0:
        return 0.0
    b_mat = np.asarray(h)[np.asarray(a_mask, dtype=bool)][:, idx]
    y_a = np.asarray(y)[np.asarray(a_mask, dtype=bool)]
    chol = _cholesky(b_mat.T @ b_mat + np.eye(idx.size) / sigma2)
    z = np.linalg.solve(chol, b_mat.T @ y_a)
    logdet = idx.size * math.log(sigma2) + 2.0 * np.log(np.diag(chol)).sum()
    return float(0.5 * z @ z - 0.5 * logdet)


@lru_cache(maxsize=32)
def _support_groups(n: int):
    masks = ((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1).astype(bool)
    sizes = masks.sum(axis=1)
    groups = []
    for size in range(1, n + 1):
        sel = np.flatnonzero(sizes == size)
        groups.append((sel, np.array([np.flatnonzero(masks[i]) for i in sel])))
    return sizes, groups


def _all_log_g(inst: Instance, sigma2: float, groups) -> np.ndarray:
    b_mat = inst.h[inst.a_mask]
    gram = b_mat.T @ b_mat
    proj = b_mat.T @ inst.y[inst.a_mask]
    out = np.zeros(2 ** inst.n)
    for sel, idx in groups:
        size = idx.shape[1]
        inner = gram[idx[:, :, None], idx[:, None, :]] + np.eye(size) / sigma2
        chol = _cholesky(inner)
        z = np.linalg.solve(chol, proj[idx][..., None])[..., 0]
        logdet = size * math.log(sigma2) + 2.0 * np.log(np.diagonal(chol, axis1=1, axis2=2)).sum(axis=1)
        out[sel] = 0.5 * (z * z).sum(axis=1) - 0.5 * logdet
    return out


def _estimate(values, n) -> OracleEstimate:
    values = np.asarray(values, dtype=float)
    trials = values.size
    std_err = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return OracleEstimate(mean=float(values.mean()), std_err=std_err, trials=trials, n=n)


def _check_trials(trials):
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials!r}")


def mc_i1(n: int, trials: int, params: ChannelParams, law: SparsityLaw | None = None, seed: int = 0, workers: int | None = None) -> OracleEstimate:
    """Per-symbol ``I(X; Y | A, H)`` at dimension ``n`` by exact support enumeration.

    ``I = (1/2n) E||A H X||^2 - (1/n) E ln sum_S Pr(S) G(S)``, the first term
    in closed form ``sigma2 E[|S|] k / (2 n^2)``.
    """
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise SizeError(f"support enumeration needs 1 <= n <= {MAX_ENUMERATION_N}, got {n!r}")
    _check_trials(trials)
    sizes, groups = _support_groups(n)
    level_logpmf = pattern_level_logpmf(n, params.p, law)
    # ln Pr(S) for one support of each size
    per_support = level_logpmf - (special.gammaln(n + 1) - special.gammaln(np.arange(n + 1) + 1) - special.gammaln(n - np.arange(n + 1) + 1))
    log_prior = per_support[sizes]
    k = round(params.q * n)
    mean_size = float(np.exp(level_logpmf) @ np.arange(n + 1))
    constant = 0.5 * params.sigma2 * mean_size * k / n ** 2

    def one(trial):
        inst = sample_instance(n, params, law, seed, trial)
        return special.logsumexp(log_prior + _all_log_g(inst, params.sigma2, groups)) / n

    values = np.array(ordered_map(one, range(trials), workers))
    est = _estimate(values, n)
    return OracleEstimate(mean=constant - est.mean, std_err=est.std_err, trials=trials, n=n)


def mc_i2(n: int, trials: int, params: ChannelParams, law: SparsityLaw | None = None, seed: int = 0, workers: int | None = None) -> OracleEstimate:
    """Per-symbol ``I(Y; U | A, H, S) = (1/2n) E ln det(sigma2 H_S^T A H_S + I)``."""
    if not 1 <= n <= MAX_LOGDET_N:
        raise SizeError(f"log-determinant oracle needs 1 <= n <= {MAX_LOGDET_N}, got {n!r}")
    _check_trials(trials)

    def one(trial):
        inst = sample_instance(n, params, law, seed, trial)
        b_mat = inst.h[inst.a_mask][:, inst.s]
        if b_mat.shape[1] == 0:
            return 0.0
        chol = _cholesky(params.sigma2 * b_mat.T @ b_mat + np.eye(b_mat.shape[1]))
        return float(np.log(np.diag(chol)).sum() / n)

    return _estimate(ordered_map(one, range(trials), workers), n)
