import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from charsum_lab import arith, primescan as ps

SQRT2 = ps.THETAS["sqrt2"]


def test_sieve_small_and_counts():
    p = ps.primes_upto(10_000)
    assert p.tolist() == [n for n in range(10_001) if arith.is_prime(n)]
    assert ps.primes_upto(10 ** 6).size == 78_498
    assert ps.primes_upto(1).size == 0 and ps.primes_upto(2).tolist() == [2]


def test_sieve_across_segments():
    n = 2 * ps.SEGMENT + 37
    p = ps.primes_upto(n)
    rng = np.random.default_rng(0)
    for x in rng.integers(ps.SEGMENT - 500, n, 3000):
        assert (x in set(p[-200_000:].tolist())) == arith.is_prime(int(x))
    assert np.all(np.diff(p) > 0)


@given(st.sampled_from(list(ps.THETAS.values())), st.integers(2, 10 ** 8))
def test_floor_theta_exact(theta, p):
    k = ps.floor_theta_p(theta, np.array([p]))[0]
    assert k == math.floor(Fraction(theta) * p)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5), st.integers(0, 5000))
def test_horner_against_bigint(coeffs, start):
    if all(c == 0 for c in coeffs):
        return
    cfg = ps.ScanConfig(20_000)
    res = ps.count_poly_hits(cfg, coeffs)
    primes = ps.primes_upto(20_000)
    k = ps.floor_theta_p(SQRT2, primes)
    hits = [p for p, kk in zip(primes.tolist(), k.tolist())
            if sum(c * kk ** i for i, c in enumerate(coeffs)) % p == 0]
    assert res.total == len(hits)


def test_linear_floor_theta_hits_only_p2():
    # floor(sqrt2 p) lies in [p, 2p), so it is 0 mod p only when it equals p, i.e. p = 2
    res = ps.count_poly_hits(ps.ScanConfig(10 ** 6), [0, 1])
    assert res.total == 1 and res.counts[0] == 1


def test_quadratic_hits_bounded():
    res = ps.count_poly_hits(ps.ScanConfig(10 ** 6), [1, 0, 1])
    assert res.total <= 10 * 10 ** 3


def test_constant_sequence_saturates():
    cfg = ps.ScanConfig(10 ** 6, kind="explicit", sequence=lambda p: np.full_like(p, 3))
    res = ps.count_poly_hits(cfg, [-3, 1])
    n_primes = ps.primes_upto(10 ** 6).size
    assert res.total >= n_primes - 2
    assert ps.psi(cfg) == 1
    lst = ps.ScanConfig(1000, kind="explicit", sequence=[3] * 168)
    assert ps.count_poly_hits(lst, [-3, 1]).total == 168


def test_psi_floor_theta_is_injective():
    cfg = ps.ScanConfig(10 ** 5)
    assert ps.psi(cfg) == ps.primes_upto(10 ** 5).size


def test_errors():
    with pytest.raises(ps.ScanError):
        ps.count_poly_hits(ps.ScanConfig(1000), [0, 0, 0])
    with pytest.raises(ps.ScanError):
        ps.ScanConfig(10 ** 9)
    with pytest.raises(ps.ScanError):
        ps.ScanConfig(1000, degree=5)
    with pytest.raises(ps.ScanError):
        ps.ScanConfig(1000, coeff_bound=1001)
    with pytest.raises(ps.ScanError):
        ps.ScanConfig(1000, kind="explicit")
    with pytest.raises(ps.ScanError):
        ps.uniformity_report(ps.ScanConfig(1000), polynomials=[])
    with pytest.raises(ps.ScanError):
        ps.uniformity_report(ps.ScanConfig(1000, degree=0, coeff_bound=0))
    with pytest.raises(ps.ScanError):
        ps.parse_theta("pi-ish")
    short = ps.ScanConfig(1000, kind="explicit", sequence=[1, 2, 3])
    with pytest.raises(ps.ScanError):
        ps.count_poly_hits(short, [1, 1])


def test_dyadic_edges_cover_range():
    edges = ps.dyadic_edges(10 ** 6)
    assert edges[0] == 2 and edges[-1] == 10 ** 6 + 1
    res = ps.count_poly_hits(ps.ScanConfig(10 ** 6), [1, 1])
    assert res.n_primes.sum() == 78_498


def test_enumeration_matches_explicit_family():
    import itertools
    cfg = ps.ScanConfig(10 ** 4, degree=2, coeff_bound=4)
    fam = [list(c) for c in itertools.product(range(-4, 5), repeat=3)]
    a = ps.uniformity_report(cfg)
    b = ps.uniformity_report(cfg, polynomials=fam)
    assert a.n_polynomials == b.n_polynomials == 9 ** 3 - 1
    assert np.array_equal(a.max_hits, b.max_hits) and np.allclose(a.mean_hits, b.mean_hits)
    c = ps.uniformity_report(cfg, threads=3, chunk=5000)
    assert np.array_equal(a.max_hits, c.max_hits) and np.array_equal(a.mean_hits, c.mean_hits)


def test_report_examples():
    r1 = ps.uniformity_report(ps.ScanConfig(10 ** 6, SQRT2, degree=1, coeff_bound=10))
    assert r1.exponent_max <= 0.6
    r2 = ps.uniformity_report(ps.ScanConfig(10 ** 5, ps.THETAS["golden"], degree=2, coeff_bound=5))
    assert r2.max_hits.max() <= 50
    d = r2.to_dict()
    assert d["n_polynomials"] == 11 ** 3 - 1 and len(d["ranges"]) == r2.lo.size


def test_budget_flags_partial():
    r = ps.uniformity_report(ps.ScanConfig(10 ** 4, degree=2, coeff_bound=3), budget=10_000)
    assert r.partial


@pytest.mark.parametrize("theta", ["sqrt2", "golden", "e"])
def test_sublinear_growth(theta):
    cfg = ps.ScanConfig(10 ** 6, ps.parse_theta(theta))
    rng = np.random.default_rng(1)
    for _ in range(6):
        f = [int(x) for x in rng.integers(-10, 11, 3)]
        if f[2] == 0:
            f[2] = 1
        res = ps.count_poly_hits(cfg, f)
        assert ps.fit_exponent(res.lo, res.counts) < 1
        c = res.counts
        ratios = [c[i + 1] / c[i] for i in range(len(c) - 1) if c[i] > 0]
        assert all(r <= 10 for r in ratios)
