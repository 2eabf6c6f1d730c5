import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from charsum_lab import arith, lqnorms

THETAS = [0.0, 0.2, 1 / 3, 0.5, 0.75]
TS = [0.1, 0.3, 0.5, 0.7, 0.9]


def lerch_mp(theta, t):
    with mpmath.workdps(30):
        z = mpmath.expjpi(2 * mpmath.mpf(theta))
        return complex(mpmath.lerchphi(z, 2, t) + mpmath.lerchphi(1 / z, 2, 1 - t) / z)


def test_lerch_theta0_closed_form():
    v = lqnorms.lerch_sum(0.0, 0.5)
    assert v.value == pytest.approx(math.pi ** 2, abs=1e-6)
    for t in TS:
        v = lqnorms.lerch_sum(0.0, t).value
        assert v.real == pytest.approx(math.pi ** 2 / math.sin(math.pi * t) ** 2, rel=1e-12)
        assert abs(v.imag) < 1e-12


def test_lerch_half_direct_series():
    assert lqnorms.lerch_sum(0.5, 0.5).value == pytest.approx(lqnorms.lerch_series(0.5, 0.5),
                                                             abs=1e-8)


@pytest.mark.parametrize("theta", THETAS)
@pytest.mark.parametrize("t", TS)
def test_lerch_grid_consistency(theta, t):
    v = lqnorms.lerch_sum(theta, t)
    assert v.value == pytest.approx(lqnorms.lerch_series(theta, t), abs=1e-8)
    assert v.value == pytest.approx(lerch_mp(theta, t), abs=1e-10)
    assert v.error < 1e-8


@given(st.floats(-2, 2), st.floats(0.01, 0.99))
def test_lerch_conjugation(theta, t):
    a = lqnorms.lerch_sum(theta, t).value
    b = lqnorms.lerch_sum(-theta, t).value
    assert a == pytest.approx(b.conjugate(), abs=1e-9 * max(1, abs(a)))


@pytest.mark.parametrize("t", [0.0, 1.0, -0.2, 1.5])
def test_lerch_rejects_endpoints(t):
    with pytest.raises(ValueError):
        lqnorms.lerch_sum(0.3, t)


def test_m2r_examples():
    assert lqnorms.m2r(0.0, 0.5, 1) == pytest.approx(math.pi ** 4, rel=1e-10)
    with pytest.raises(ValueError):
        lqnorms.m2r(0.1, 0.5, 0)


@given(st.floats(-1, 1), st.floats(0.05, 0.95), st.integers(1, 3))
def test_m2r_period_half(alpha, t, r):
    a, b = lqnorms.m2r(alpha, t, r), lqnorms.m2r(alpha + 0.5, t, r)
    assert a == pytest.approx(b, rel=1e-8, abs=1e-10)


@pytest.mark.parametrize("t", [0.1, 0.3, 0.5])
@pytest.mark.parametrize("r", [1, 2])
def test_m2r_grid_minimum_at_quarter(t, r):
    alphas = np.arange(17) / 32
    vals = [lqnorms.m2r(a, t, r) for a in alphas]
    assert alphas[int(np.argmin(vals))] == 0.25


@pytest.mark.parametrize("t", [0.1, 0.25, 0.5])
@pytest.mark.parametrize("r", [1, 2])
def test_m2r_monotone_around_quarter(t, r):
    left = [lqnorms.m2r(a, t, r) for a in np.linspace(0.15, 0.25, 50)]
    right = [lqnorms.m2r(a, t, r) for a in np.linspace(0.25, 0.35, 50)]
    tol = 1e-9 * max(left + right)
    assert all(b <= a + tol for a, b in zip(left, left[1:]))
    assert all(b >= a - tol for a, b in zip(right, right[1:]))


@pytest.mark.parametrize("theta", [0.3, 0.5, 0.6, 0.7])    # cos(2 pi theta) < 0
@pytest.mark.parametrize("t", [0.1, 0.3, 0.5, 0.8])
def test_decomposition(theta, t):
    x = np.linspace(1e-6, 1 - 1e-6, 2001)
    g1, g2 = lqnorms.integrand_values(theta, t, x)
    assert np.all(g1 >= 0) and np.all(g2 >= 0)
    d = lqnorms.lerch_decomposition(theta, t)
    assert d.i1 >= 0 and d.i2 >= 0
    v = lqnorms.lerch_sum(theta, t).value
    assert d.total == pytest.approx(abs(v) ** 2, abs=1e-8 * max(1, abs(v) ** 2))
    assert v == pytest.approx(d.i2 + cmath.exp(-2j * math.pi * theta) * d.i1, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.0, 0.1, 0.25, 0.4])
def test_phi1_is_one(alpha):
    assert lqnorms.phi_k(alpha, 1) == pytest.approx(1.0, abs=1e-3)


def test_phi_symmetry_and_errors():
    for a in (0.05, 0.15):
        assert lqnorms.phi_k(a, 2) == pytest.approx(lqnorms.phi_k(0.5 - a, 2), rel=1e-12)
        assert lqnorms.phi_k(a, 2) == pytest.approx(lqnorms.phi_k(a + 0.5, 2), rel=1e-12)
    with pytest.raises(ValueError):
        lqnorms.phi_k(0.2, 5)
    with pytest.raises(ValueError):
        lqnorms.phi_k(0.2, 2, L=41)
    with pytest.raises(ValueError):
        lqnorms.argmin_scan(2, 9)


def test_argmin_k2_and_flat_k1():
    res = lqnorms.argmin_scan(2, 33)
    assert res.alpha_star == 0.25 and not res.flat
    assert np.allclose(res.values, res.values[::-1])
    flat = lqnorms.argmin_scan(1, 17)
    assert flat.flat and np.all(np.abs(flat.values - 1) <= 1e-3)


def test_phi2_quarter_vs_finite_q():
    assert abs(lqnorms.phi_k(0.25, 2) - lqnorms.finite_q_lq_norm(4999, 2, 0.25)) <= 0.02


def test_finite_q_l4_autocorrelation_oracle():
    q = 101
    a = q // 4
    coeffs = arith.legendre_array(q)[(np.arange(1, q + 1) + a) % q].astype(float)
    corr = np.correlate(coeffs, coeffs, mode="full")      # |F|^2 = sum_h C(h) e(h t)
    l4 = float(np.sum(corr ** 2)) ** 0.25 / math.sqrt(q)
    assert lqnorms.finite_q_lq_norm(q, 2, 0.25) == pytest.approx(l4, rel=1e-12)


def test_pairing_moment_vs_monte_carlo():
    rng = np.random.default_rng(9)
    L, n = 30, 40_000
    m = np.arange(-L, L + 1)
    for _ in range(10):
        alpha, t, k = float(rng.uniform(0, 0.5)), float(rng.uniform(0.05, 0.95)), int(rng.integers(1, 4))
        y = rng.choice([-1.0, 1.0], size=(n, m.size))
        z = y @ (np.exp(2j * np.pi * m * alpha) / (m + t))
        samples = (abs(np.exp(2j * np.pi * t) - 1) * np.abs(z) / (2 * np.pi)) ** (2 * k)
        est, se = samples.mean(), samples.std(ddof=1) / math.sqrt(n)
        assert abs(lqnorms.pairing_moment(alpha, t, k, L) - est) <= 3 * se
