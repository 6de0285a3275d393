import math

import numpy as np
import pytest
from scipy import integrate

from sparse_rates import DomainError, ScalarChannel, binary_entropy, scalar_mi, scalar_mmse

# mpmath quadrature of h(Y) - ln(2 pi e / eta) / 2 and of (1/2) int_0^eta mmse
MI_02_10_05 = 0.28922869317519536313


def quad_mmse(p, s2, eta):
    v0, v1 = 1 / eta, s2 + 1 / eta
    def integrand(y):
        f0 = (1 - p) * math.exp(-y * y / (2 * v0)) / math.sqrt(2 * math.pi * v0)
        f1 = p * math.exp(-y * y / (2 * v1)) / math.sqrt(2 * math.pi * v1)
        return (f1 * s2 / v1 * y) ** 2 / (f0 + f1) if f0 + f1 > 0 else 0.0
    sd = math.sqrt(v1)
    return p * s2 - 2 * integrate.quad(integrand, 0, 40 * sd, limit=400, epsabs=1e-14, epsrel=1e-13)[0]


def test_trivial_limits():
    assert scalar_mmse(ScalarChannel(0.0, 10.0, 3.0)) == 0.0
    assert scalar_mmse(ScalarChannel(0.2, 10.0, 0.0)) == 2.0
    assert scalar_mmse(ScalarChannel(1.0, 10.0, 1.0)) == pytest.approx(10 / 11, abs=1e-15)
    assert scalar_mi(ScalarChannel(0.0, 10.0, 1.0)) == 0.0
    assert scalar_mi(ScalarChannel(0.3, 10.0, 0.0)) == 0.0
    assert scalar_mi(ScalarChannel(1.0, 10.0, 1.0)) == pytest.approx(0.5 * math.log(11.0), abs=1e-14)


def test_mi_matches_high_precision_reference():
    assert scalar_mi(ScalarChannel(0.2, 10.0, 0.5)) == pytest.approx(MI_02_10_05, abs=1e-12)


@pytest.mark.parametrize("p,s2,eta", [(0.2, 10.0, 0.5), (0.05, 1000.0, 0.3), (0.5, 1.0, 2.0), (0.9, 100.0, 0.01), (0.01, 1e4, 1.0)])
def test_mmse_matches_adaptive_quadrature(p, s2, eta):
    assert scalar_mmse(ScalarChannel(p, s2, eta)) == pytest.approx(quad_mmse(p, s2, eta), rel=1e-9, abs=1e-12)


def test_i_mmse_relation():
    rng = np.random.default_rng(3)
    for eta in np.exp(rng.uniform(math.log(1e-3), math.log(20.0), 20)):
        for p, s2 in ((0.2, 10.0), (0.1, 100.0)):
            h = 1e-4 * eta
            d = (scalar_mi(ScalarChannel(p, s2, eta + h)) - scalar_mi(ScalarChannel(p, s2, eta - h))) / (2 * h)
            half = 0.5 * scalar_mmse(ScalarChannel(p, s2, eta))
            assert d == pytest.approx(half, rel=1e-5)


def test_monotone_and_bounded():
    etas = np.logspace(-3, 2, 40)
    p, s2 = 0.2, 10.0
    mi = [scalar_mi(ScalarChannel(p, s2, e)) for e in etas]
    mm = [scalar_mmse(ScalarChannel(p, s2, e)) for e in etas]
    assert all(b > a for a, b in zip(mi, mi[1:]))
    assert all(b < a for a, b in zip(mm, mm[1:]))
    for e, v, m in zip(etas, mi, mm):
        assert v <= 0.5 * math.log1p(e * p * s2) + binary_entropy(p)
        assert 0.0 <= m <= p * s2


def test_rejects_invalid():
    with pytest.raises(DomainError):
        ScalarChannel(-0.1, 1.0, 1.0)
    with pytest.raises(DomainError):
        ScalarChannel(0.1, 1.0, -1.0)
