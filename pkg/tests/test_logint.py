import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from charsum_lab import arith, charsum, diffcover, logint
from charsum_lab.processes import sampling


# ---------------------------------------------------------------- bumps

def test_bump_values():
    assert logint.bump("rho", 0.5) == pytest.approx(0.5)
    assert logint.bump("rho", 0.0) == 0.0 and logint.bump("rho", 1.0) == 1.0
    assert logint.bump("w_eps", 0.01, 0.01) == 0.0
    assert logint.bump("w_eps", 0.02, 0.01) == pytest.approx(1.0)
    assert logint.bump("phi", 0.5) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        logint.bump("gauss", 0.5)
    with pytest.raises(ValueError):
        logint.BumpSpec(0.0, "w_eps")


@given(st.floats(-2, 3))
def test_rho_symmetry_and_range(t):
    r = logint.rho(t)
    assert 0 <= r <= 1
    assert r + logint.rho(1 - t) == pytest.approx(1.0)


def test_phi_plateau_and_flatness():
    t = np.linspace(1 / 3, 2 / 3, 101)
    assert np.allclose(logint.phi(t), 1.0)
    for n in (1, 2, 3, 4):
        # flat to all orders: phi(t)/t^n -> 0 at both ends
        assert logint.phi(1e-2) / 1e-2 ** n < 1e-6
        assert logint.phi(1 - 1e-2) / 1e-2 ** n < 1e-6


@pytest.mark.parametrize("eps", [1e-2, 1e-3])
def test_w_eps_minorant(eps):
    t = np.linspace(0, 5 * eps, 1000)
    w = logint.w_eps(t, eps)
    ind = (t >= eps).astype(float)
    assert np.all(w <= ind) and np.all(1 - w >= 1 - ind)
    assert np.all((w >= 0) & (w <= 1))
    assert np.all(w[t <= eps] == 0) and np.allclose(w[t >= 2 * eps], 1)


# ---------------------------------------------------------------- quadrature

def sine2(t):
    t = np.asarray(t, dtype=float)
    return 2 * np.sin(np.pi * np.minimum(t, 1 - t))


def test_regularized_constants():
    for c in (0.5, 3.0, -2.0):
        assert logint.log_integral_regularized(lambda t: np.full(np.shape(t), c), 1e-3) == \
            pytest.approx(math.log(abs(c)), abs=1e-9)
    assert logint.log_integral_regularized(lambda t: np.full(np.shape(t), 5e-4), 1e-3) == 0.0


def test_regularized_sine():
    # int_0^1 log(2 sin pi t) dt = 0; the cut near t = 0, 1 costs O(eps log eps)
    eps = 1e-4
    v = logint.log_integral_regularized(sine2, eps)
    assert abs(v) <= 1e-4 + math.sqrt(eps)
    # exactly: minus the part removed by the cutoff, which lives where 2 sin(pi t) < 2 eps
    edge = math.asin(eps) / math.pi

    def removed(t):
        f = 2 * math.sin(math.pi * t)
        return math.log(f) * (1 - logint.w_eps(f, eps))

    cut, _ = integrate.quad(removed, 0, edge, epsabs=1e-14, limit=200)
    assert v == pytest.approx(-2 * cut, abs=1e-7)


def test_full_log_integral_oracles():
    assert abs(logint.log_integral(sine2)) < 1e-7
    exact = (1 / 3) * math.log(1 / 3) + (2 / 3) * math.log(2 / 3) - 1
    assert logint.log_integral(lambda t: t - 1 / 3) == pytest.approx(exact, abs=1e-8)
    # double root: log|t - 1/2|^2
    exact2 = 2 * (math.log(0.5) - 1)
    assert logint.log_integral(lambda t: (t - 0.5) ** 2) == pytest.approx(exact2, abs=1e-7)


def test_adaptive_batch_and_nonconvergence():
    fs = [lambda t: t - 0.3, lambda t: np.exp(1j * t)]
    res = logint.adaptive_log_quadrature(lambda rows, t: np.where(rows == 0, t - 0.3, np.exp(1j * t)),
                                         2, logint._log_abs)
    assert res.converged.all()
    exact = 0.3 * math.log(0.3) + 0.7 * math.log(0.7) - 1
    assert res.values[0] == pytest.approx(exact, abs=1e-8)
    assert res.values[1] == pytest.approx(0.0, abs=1e-12)
    short = logint.adaptive_log_quadrature(lambda rows, t: t - 1 / 3, 1, logint._log_abs,
                                           max_depth=2)
    assert not short.converged[0]
    err = logint.QuadratureError("stalled", 1.5)
    assert err.partial == 1.5 and isinstance(err, RuntimeError)


def test_regularized_monotone_in_eps():
    batch = sampling.sample_batch("rademacher", None, 0.2, 1.1, 500, 1, range(20))
    fam = logint.path_family(batch)
    for f in fam:
        vals = [logint.log_integral_regularized(f, eps) for eps in (0.3, 1e-1, 1e-2, 1e-3, 1e-4)]
        # lowering eps admits more of the region where log|f| < 0
        assert all(b <= a + 1e-6 for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------- finite q

def brute_finite_q(q, alpha, beta, fix="none"):
    table = arith.character_table(q)
    j = table.quadratic_index
    total = 0.0
    for k in range(q):
        p = charsum.MixedSumParams(q, k, alpha, beta)
        sign = {"none": 0, "plus": 1, "minus": -1}[fix]

        def g(t):
            v = charsum.f_normalized(table, j, p, t)
            v += sign * np.exp(2j * np.pi * (-p.alpha * k + t)) / math.sqrt(q)
            return math.log(max(abs(v), 1e-300))

        val, _ = integrate.quad(g, 0, 1, limit=400, epsabs=1e-11, epsrel=1e-11)
        total += val
    return total / q - 0.5 * math.log(beta)


@pytest.mark.parametrize("q,alpha,beta,fix", [(101, 0.2, 1.1, "none"), (53, 0.0, 1.0, "none"),
                                               (61, 0.25, 1.0, "plus")])
def test_finite_q_against_direct_quadrature(q, alpha, beta, fix):
    assert logint.mahler_finite_q(q, alpha, beta, fix) == pytest.approx(
        brute_finite_q(q, alpha, beta, fix), abs=1e-6)


def test_finite_q_fekete_and_turyn():
    assert math.exp(logint.mahler_finite_q(4999, 0.0, 1.0)) == pytest.approx(0.748, abs=0.02)
    assert math.exp(logint.mahler_finite_q(4999, 0.25, 1.0)) == pytest.approx(0.951, abs=0.02)


def test_finite_q_littlewood_fix_small():
    base = logint.mahler_finite_q(1009, 0.2, 1.1)
    for fix in ("plus", "minus"):
        assert abs(math.exp(logint.mahler_finite_q(1009, 0.2, 1.1, fix)) - math.exp(base)) <= 0.05


def test_finite_q_errors():
    with pytest.raises(ValueError):
        logint.mahler_finite_q(20011, 0.2, 1.1)
    with pytest.raises(ValueError):
        logint.mahler_finite_q(101, 0.2, 1.1, "both")
    with pytest.raises(arith.ModulusError):
        logint.mahler_finite_q(100, 0.2, 1.1)


# ---------------------------------------------------------------- limit

def test_limit_estimate_small_run():
    a = logint.mahler_limit_estimate(0.2, 1.1, n_trunc=1000, n_samples=100, seed=5)
    b = logint.mahler_limit_estimate(0.2, 1.1, n_trunc=1000, n_samples=100, seed=5)
    assert a.value == b.value and np.array_equal(a.per_sample, b.per_sample)
    assert a.value > 0 and a.stderr >= 0
    assert a.value == pytest.approx(math.exp(a.per_sample.mean()))
    assert a.correction_bound == pytest.approx(1e-4 ** (1 / 6))
    assert set(a.to_dict()) >= {"alpha", "beta", "value", "stderr", "n_samples", "n_trunc",
                                "epsilon", "seed"}
    with pytest.raises(ValueError):
        logint.mahler_limit_estimate(0.2, 1.1, n_samples=50)


def test_sample_log_integral_matches_direct():
    batch = sampling.sample_batch("rademacher", None, 0.2, 1.1, 300, 2, [0])
    vals, bad = logint.sample_log_integrals(0.2, 1.1, 300, 2, [0])
    coeffs = sampling.draw_coefficients("rademacher", None, 300, 2, 0)

    def g(t):
        v = sampling.direct_path(coeffs, 0.2, 1.1, np.array([t]))[0]
        return math.log(abs(v))

    ref, _ = integrate.quad(g, 0, 1, limit=500, epsabs=1e-10)
    assert bad == 0
    assert vals[0] == pytest.approx(ref - 0.5 * math.log(1.1), abs=1e-6)


# ---------------------------------------------------------------- small values

def test_probe_linear_oracle():
    eps = [1e-2, 1e-3, 1e-4, 1e-5]
    table = logint.epsilon_scaling_probe([lambda t: np.asarray(t) - 0.5], eps)
    for row in table.rows:
        assert row.measure == pytest.approx(2 * row.epsilon, rel=1e-9)
        assert row.log_integral == pytest.approx(2 * row.epsilon * (math.log(row.epsilon) - 1),
                                                 rel=1e-6)
    assert table.measure_exponent == pytest.approx(1.0, abs=1e-6)


def test_probe_quadratic_oracle():
    eps = [1e-2, 1e-3, 1e-4, 1e-5]
    table = logint.epsilon_scaling_probe([lambda t: (np.asarray(t) - 0.4) ** 2], eps)
    for row in table.rows:
        assert row.measure == pytest.approx(2 * math.sqrt(row.epsilon), rel=1e-6)
    assert table.measure_exponent == pytest.approx(0.5, abs=1e-6)


def test_probe_errors():
    with pytest.raises(ValueError):
        logint.epsilon_scaling_probe([np.sin], [1e-2, 1e-3, 1e-4])
    with pytest.raises(ValueError):
        logint.epsilon_scaling_probe([np.sin], [1e-2, 1e-4, 1e-3, 1e-5])
    with pytest.raises(ValueError):
        logint.epsilon_scaling_probe([np.sin], [1e-2, 1e-3, 1e-4, 1e-5], part="arg")


def sign_changes(v):
    s = np.sign(v)
    s = s[s != 0]
    return int(np.sum(s[1:] != s[:-1]))


def test_zero_count_against_delta():
    grid = np.linspace(0, 1, 2001)
    worst = -10**9
    for i in range(100):
        coeffs = sampling.draw_coefficients("rademacher", None, 100, 7, i)
        a = diffcover.a_series(coeffs, 0.2, 1.1, grid)
        da = diffcover.delta_a_series(coeffs, 0.2, 1.1, grid)
        worst = max(worst, sign_changes(a.real) - sign_changes(da.real))
    assert worst <= 10
