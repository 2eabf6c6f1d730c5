import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from charsum_lab import diffcover as dc

ALPHA, BETA = 0.2, 1.1
PEAK = -4 * math.pi ** 4 * BETA ** 4


def test_summand_filled_points():
    assert dc.a_summand(0, 0.0, ALPHA, BETA) == pytest.approx(PEAK, rel=1e-12)
    assert dc.a_summand(-1, 1.0, ALPHA, BETA) == pytest.approx(
        PEAK * cmath.exp(-2j * math.pi * ALPHA), rel=1e-12)
    # the t-derivative at the filled point is about 2103 in modulus, so the
    # value at t = 1e-6 sits 2.1e-3 away; compare with a 50-digit evaluation
    assert dc.a_summand(0, 1e-6, ALPHA, BETA) == pytest.approx(display_mp(0, "1e-6"), abs=1e-9)
    assert abs(dc.a_summand(0, 1e-7, ALPHA, BETA) - PEAK) <= 1e-3


def display_mp(l, t, alpha="0.2", beta="1.1"):
    with mpmath.workdps(50):
        a, b, u = mpmath.mpf(alpha), mpmath.mpf(beta), l + mpmath.mpf(t)
        e = lambda x: mpmath.expjpi(2 * x)
        pb = mpmath.pi * b
        v = (12 * pb * u * e(b * mpmath.mpf(t)) * e((a + b) * l) * (pb * u + 1j)
             - e(a * l) * (e(b * u) - 1) * (6 + 4 * pb ** 2 * u ** 2)) / u ** 4
        return complex(v)


@given(st.integers(-40, 40), st.floats(0, 1), st.floats(-1, 1), st.floats(0.3, 2.0))
def test_summand_matches_display(l, t, alpha, beta):
    if abs(l + t) < 0.05:
        return      # the displayed quotient cancels catastrophically near its removable point
    a = complex(dc.a_summand(l, t, alpha, beta))
    b = dc.a_summand_display(l, t, alpha, beta)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(b))


def test_summand_near_singularity_is_smooth():
    ts = np.linspace(0, 1e-2, 11)
    v = dc.a_summand(np.zeros_like(ts, dtype=int), ts, ALPHA, BETA)
    assert np.all(np.abs(np.diff(v)) < 3000 * 1e-3)


def test_summand_derivative_matches_differences():
    for l, t in [(0, 0.0), (0, 0.3), (-1, 0.9), (3, 0.5), (-7, 0.1)]:
        h = 1e-5
        fd = (dc.a_summand(l, t + h, ALPHA, BETA) - dc.a_summand(l, t - h, ALPHA, BETA)) / (2 * h)
        assert dc.a_summand_dt(l, t, ALPHA, BETA) == pytest.approx(fd, rel=1e-5, abs=1e-4)


def test_delta_truncated_zero_and_missing():
    assert dc.delta_a_truncated(np.zeros(4), ALPHA, BETA, 0.4, 2) == 0
    with pytest.raises(KeyError):
        dc.delta_a_truncated({-2: 1, -1: 1, 0: 1}, ALPHA, BETA, 0.4, 2)
    with pytest.raises(ValueError):
        dc.delta_a_truncated(np.ones(3), ALPHA, BETA, 0.4, 2)


def test_delta_truncated_all_ones_independent_coding():
    val = dc.delta_a_truncated({l: 1 for l in range(-2, 2)}, ALPHA, BETA, 0.5, 2)
    ref = sum(dc.a_summand_display(l, 0.5, ALPHA, BETA) for l in range(-2, 2))
    assert val == pytest.approx(ref, abs=1e-9)


def test_delta_series_against_finite_differences():
    rng = np.random.default_rng(1)
    M_big = 200
    bound = dc.truncation_error_bound(BETA, 2)
    pats = dc.generic_patterns()
    for _ in range(10):
        pat = pats[int(rng.integers(len(pats)))]
        t = float(rng.uniform(0.01, 0.99))
        # weights conj(chi(k - l)) for l = -M'..M'; the pattern fixes l = -2..1
        w = rng.choice([-1.0, 1.0], size=2 * M_big + 1).astype(complex)
        w[M_big - 2: M_big + 2] = np.conj(pat.chi_values(2))
        f = lambda s: dc.a_series(w, ALPHA, BETA, s)
        numeric = dc.delta_numeric(f, t, BETA, h=1e-3)
        trunc = dc.delta_a_truncated(pat.chi_values(2), ALPHA, BETA, t, 2)
        assert abs(trunc - numeric) <= bound + 1e-2
        fine = dc.delta_numeric(f, t, BETA, h=3e-4)      # stencil error is O(h^2)
        assert dc.delta_a_series(w, ALPHA, BETA, [t])[0] == pytest.approx(fine, rel=1e-5)


def zeta_tail_oracle(beta, M):
    z = lambda s: mpmath.zeta(s) - sum(mpmath.mpf(1) / m ** s for m in range(1, M))
    return float(40 * mpmath.pi ** 2 * beta ** 2 * z(2) + 24 * mpmath.pi * beta * z(3) + 24 * z(4))


def test_truncation_bound_values():
    assert dc.truncation_error_bound(1.1, 2) < 326.9
    assert dc.truncation_error_bound(1.1, 28) == pytest.approx(17.5, abs=0.1)
    for M in (2, 5, 28, 77):
        assert dc.truncation_error_bound(1.3, M) == pytest.approx(zeta_tail_oracle(1.3, M), rel=1e-12)
    vals = [dc.truncation_error_bound(1.1, M) for M in range(2, 101)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        dc.truncation_error_bound(1.1, 1)


def test_pattern_counts():
    gen = dc.generic_patterns()
    assert len(gen) == 32 and len(set(gen)) == 32
    assert sum(p.values[0] == 0 for p in gen) == 8 and sum(p.values[3] == 0 for p in gen) == 8
    for shift in (0, -1):
        for parity in (1, -1):
            sp = dc.special_patterns(shift, parity)
            assert len(sp) == 512
            assert len({tuple(p.chi_values(28)) for p in sp}) == 512


def test_special_pattern_multiplicative():
    p = dc.special_patterns(0, -1)[137]
    for a in range(-28, 29):
        for b in range(-28, 29):
            if a * b != 0 and abs(a * b) <= 28:
                assert p.chi(a * b) == p.chi(a) * p.chi(b)
    assert p.chi(-1) == -1 and p.chi(0) == 0
    # k = q - 1: chi(k - l) = chi(-1 - l)
    q1 = dc.special_patterns(-1, 1)[5]
    vals = q1.chi_values(28)
    ls = dc.truncation_range(28)
    assert all(v == q1.chi(-1 - int(l)) for v, l in zip(vals, ls))


@pytest.fixture(scope="module")
def generic_ctx():
    return dc._CoverContext.build(ALPHA, BETA, 2)


@pytest.fixture(scope="module")
def special_ctx():
    return dc._CoverContext.build(ALPHA, BETA, 28)


def check_tiling(cert):
    iv = cert.intervals
    assert iv[0].lo == 0.0 and iv[-1].hi == 1.0
    assert all(a.hi == b.lo for a, b in zip(iv, iv[1:]))
    assert all(i.margin > 0 for i in iv)


def test_generic_covers(generic_ctx):
    for p in dc.generic_patterns():
        cert = dc.find_cover(p, ALPHA, BETA, 2, context=generic_ctx)
        assert cert.ok and len(cert.intervals) <= 4
        check_tiling(cert)


def test_special_covers_even_k0(special_ctx):
    for p in dc.special_patterns(0, 1):
        cert = dc.find_cover(p, ALPHA, BETA, 28, context=special_ctx)
        assert cert.ok and len(cert.intervals) <= 5
        check_tiling(cert)


def test_perturbed_generic_covers(generic_ctx):
    for p in dc.generic_patterns():
        cert = dc.find_cover(p, ALPHA, BETA, 2, perturbation=0.05, context=generic_ctx)
        assert cert.ok


def test_falsified_pattern_fails(generic_ctx):
    p = dc.SignPattern("generic", (0.001, 0.001, 0.001, 0.001))
    cert = dc.find_cover(p, ALPHA, BETA, 2, context=generic_ctx)
    assert not cert.ok
    lo, hi = cert.failure
    assert 0 <= lo < hi <= 1


def test_certificate_soundness(generic_ctx, special_ctx):
    rng = np.random.default_rng(2)
    cases = [(p, 2, generic_ctx) for p in dc.generic_patterns()]
    cases += [(p, 28, special_ctx) for p in rng.choice(dc.special_patterns(0, 1), 24)]
    for pat, M, ctx in cases:
        cert = dc.find_cover(pat, ALPHA, BETA, M, context=ctx)
        chi = pat.chi_values(M)
        for iv in cert.intervals:
            t = rng.uniform(iv.lo, iv.hi, 1000)
            v = dc.delta_a_truncated(chi, ALPHA, BETA, t, M)
            part = v.real if iv.part == "Re" else v.imag
            assert np.all(np.abs(part) - cert.error_bound > 1)


def test_lipschitz_bound_valid():
    rng = np.random.default_rng(4)
    for M, pats in ((2, dc.generic_patterns()), (28, dc.special_patterns(-1, -1))):
        lip = dc.lipschitz_constant(ALPHA, BETA, M)
        for _ in range(200):
            p = pats[int(rng.integers(len(pats)))]
            t = float(rng.uniform(0, 1 - 1e-4))
            s = t + float(rng.uniform(0, 1e-4))
            chi = p.chi_values(M)
            d = abs(dc.delta_a_truncated(chi, ALPHA, BETA, t, M)
                    - dc.delta_a_truncated(chi, ALPHA, BETA, s, M))
            assert d <= lip * (s - t) + 1e-9


def test_verify_all_reports():
    rep = dc.verify_all_patterns("generic_M2")
    assert rep.n_certified == 32 and rep.max_intervals <= 4
    s = rep.summary()
    assert s["certified"] == 32 and s["failures"] == []
    with pytest.raises(ValueError):
        dc.verify_all_patterns("generic_M3")
