"""Acceptance checks shared by the test suite and ``charsum-lab repro``.

Each check returns a :class:`CriterionResult` with the measured numbers, so
a failure is reported with the values that caused it rather than hidden.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import arith, charsum, diffcover, logint, lqnorms, primescan
from .processes import moments, sampling

MC_SAMPLES = 20_000
MC_SAMPLES_QUICK = 4_000
MC_N_TRUNC = 10_000
SEED = 1


@dataclass
class CriterionResult:
    number: int
    claim: str
    passed: bool
    measured: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.claim} ({self.wall_time:.1f} s)"

    def to_dict(self) -> dict:
        return {"number": self.number, "claim": self.claim, "passed": bool(self.passed),
                "measured": self.measured, "wall_time": self.wall_time}


def _timed(number: int, claim: str, body: Callable[[], tuple[bool, dict]]) -> CriterionResult:
    start = time.perf_counter()
    ok, measured = body()
    return CriterionResult(number, claim, bool(ok), measured, time.perf_counter() - start)


def _mahler(alpha, beta, quick):
    n = MC_SAMPLES_QUICK if quick else MC_SAMPLES
    est = logint.mahler_limit_estimate(alpha, beta, n_trunc=MC_N_TRUNC, n_samples=n, seed=SEED)
    return est


def criterion_1(quick: bool = False) -> CriterionResult:
    def body():
        est = _mahler(0.2, 1.1, quick)
        return 0.949 <= est.value <= 0.959, {"value": est.value, "stderr": est.stderr,
                                              "n_samples": est.n_samples, "interval": [0.949, 0.959]}
    return _timed(1, "limit Mahler constant at (0.2, 1.1) in [0.949, 0.959]", body)


MAHLER_TARGETS = {
    "fekete": ((0.0, 1.0), (0.743, 0.753)),
    "turyn": ((0.25, 1.0), (0.946, 0.956)),
    "generalized_turyn": ((0.221, 1.058), (0.9485, 0.9585)),
}


def criterion_2(quick: bool = False) -> CriterionResult:
    def body():
        measured, ok = {}, True
        for name, ((a, b), (lo, hi)) in MAHLER_TARGETS.items():
            est = _mahler(a, b, quick)
            inside = lo <= est.value <= hi
            ok &= inside
            measured[name] = {"alpha": a, "beta": b, "value": est.value, "stderr": est.stderr,
                              "interval": [lo, hi], "pass": inside}
        return ok, measured
    return _timed(2, "Fekete, Turyn and generalized Turyn limit constants", body)


def criterion_3(quick: bool = False) -> CriterionResult:
    def body():
        vals = {q: math.exp(logint.mahler_finite_q(q, 0.2, 1.1)) for q in (1009, 4999, 10007)}
        dev = {q: abs(v - 0.954) for q, v in vals.items()}
        ok = all(d <= 0.03 for d in dev.values()) and dev[10007] <= 0.02
        return ok, {"values": {str(q): v for q, v in vals.items()}}
    return _timed(3, "finite-q Mahler values approach 0.954", body)


def criterion_4(quick: bool = False) -> CriterionResult:
    def body():
        gen = diffcover.verify_all_patterns("generic_M2")
        subcases = ((0, 1),) if quick else ((0, 1), (0, -1), (-1, 1), (-1, -1))
        spec = diffcover.verify_all_patterns("special_M28", subcases=subcases)
        gs, ss = gen.summary(), spec.summary()
        ok_gen = gen.n_certified == 32 == len(gen.certificates) and gen.max_intervals <= 4 \
            and gen.error_bound < 326.9
        ok_spec = all(g["patterns"] == 512 and g["certified"] == 512 and g["max_intervals"] <= 5
                      for g in ss["groups"].values()) and abs(spec.error_bound - 17.5) <= 0.1
        drop = ("failures", "groups")
        return ok_gen and ok_spec, {
            "generic": {k: v for k, v in gs.items() if k not in drop},
            "special": {k: v for k, v in ss.items() if k != "failures"},
        }
    return _timed(4, "cover certification, generic 32/32 and special 512/512", body)


def _single_point_specs(t=0.3):
    return [moments.MomentSpec((t,), (r,), (s,))
            for r in range(5) for s in range(5) if 1 <= r + s <= 4]


def _two_point_specs(t1=0.15, t2=0.7):
    out = []
    for r1, r2, s1, s2 in itertools.product(range(3), repeat=4):
        if 1 <= r1 + r2 + s1 + s2 <= 4 and r1 + s1 > 0 and r2 + s2 > 0:
            out.append(moments.MomentSpec((t1, t2), (r1, r2), (s1, s2)))
    return out


def criterion_5(quick: bool = False) -> CriterionResult:
    def body():
        alpha, beta, L = 0.2, 1.1, 10
        specs = _single_point_specs() + ([] if quick else _two_point_specs())
        worst = 0.0
        for q in (101, 1009):
            for spec in specs:
                a = moments.finite_q_moment(q, "vary_k_quadratic", None, alpha, beta, spec, L)
                b = moments.quadratic_moment_closed_form(q, alpha, beta, spec, L)
                worst = max(worst, abs(a - b))
        ratio = 0.0
        off = [s for s in _single_point_specs() if s.r[0] != s.s[0]]
        for q in (101, 401):
            for spec in off:
                v = abs(moments.finite_q_moment(q, "vary_chi", 1, alpha, beta, spec, L))
                ratio = max(ratio, v / moments.off_diagonal_bound(q, alpha, beta, spec, L))
        return worst <= 1e-10 and ratio <= 1.0, {
            "closed_form_max_error": worst, "n_specs": len(specs),
            "off_diagonal_max_ratio": ratio}
    return _timed(5, "finite-q moment oracles (closed form and off-diagonal bound)", body)


def criterion_6(quick: bool = False) -> CriterionResult:
    def body():
        rng = np.random.default_rng(SEED)
        alpha, beta = 0.2, 1.1
        measured, ok = {}, True
        for q in (11, 101, 1009):
            table = arith.character_table(q)
            half = table.quadratic_index
            others = [j for j in range(1, q - 1) if j != half]
            chars = [half] + list(rng.choice(others, size=2, replace=False))
            worst_bound, worst_abs = 0.0, 0.0
            for j in chars:
                tau = arith.gauss_sum(table, int(j)).value
                for _ in range(20):
                    k = int(rng.integers(0, q))
                    t = float(rng.uniform(0, 1))
                    params = charsum.MixedSumParams(q, k, alpha, beta)
                    val, bound = charsum.poisson_truncated(table, int(j), params, t, 20 * q, tau)
                    err = abs(val - charsum.f_normalized(table, int(j), params, t))
                    worst_abs = max(worst_abs, err)
                    worst_bound = max(worst_bound, err / bound)
            leg = worst_abs <= 1e-3 and worst_bound <= 1.0
            ok &= leg
            measured[str(q)] = {"max_error": worst_abs, "max_error_over_bound": worst_bound,
                                "pass": leg}
        return ok, measured
    return _timed(6, "Poisson truncation error within min(bound, 1e-3) at K = 20q", body)


def criterion_7(quick: bool = False) -> CriterionResult:
    def body():
        ts = (0.1, 0.3, 0.5, 0.9)
        n = 1000 if quick else 4000
        measured, ok = {}, True
        paths = sampling.sample_paths("rademacher", None, 0.0, 1.0, MC_N_TRUNC, np.array(ts),
                                      SEED, n)
        for t in ts:
            spec = moments.MomentSpec((t,), (1,), (1,))
            th = moments.theoretical_moment("rademacher", None, 0.0, 1.0, spec, 30).real
            emp, se = moments.empirical_moment(paths, spec)
            leg = abs(th - 1) <= 0.01 and abs(emp.real - 1) <= 3 * se
            ok &= leg
            measured[str(t)] = {"theoretical": th, "empirical": emp.real, "stderr": se,
                                "pass": leg}
        return ok, measured
    return _timed(7, "second moment of G equals 1 at (0, 1)", body)


def criterion_8(quick: bool = False) -> CriterionResult:
    def body():
        phi1 = {str(a): lqnorms.phi_k(a, 1) for a in (0.0, 0.1, 0.25, 0.4)}
        ok1 = all(abs(v - 1) <= 1e-3 for v in phi1.values())
        stars = {str(k): lqnorms.argmin_scan(k, 33).alpha_star for k in (2, 3, 4)}
        ok2 = all(a == 0.25 for a in stars.values())
        p2 = lqnorms.phi_k(0.25, 2)
        fq = lqnorms.finite_q_lq_norm(4999, 2, 0.25)
        ok3 = abs(p2 - fq) <= 0.02
        return ok1 and ok2 and ok3, {"phi1": phi1, "argmin": stars, "phi2_quarter": p2,
                                     "finite_q_L4": fq}
    return _timed(8, "phi_1 = 1, argmin phi_k = 1/4, phi_2(1/4) vs finite q", body)


def criterion_9(quick: bool = False) -> CriterionResult:
    def body():
        batch = sampling.sample_batch("rademacher", None, 0.2, 1.1, MC_N_TRUNC, SEED, range(100))
        eps = [1e-2, 1e-3, 1e-4, 1e-5]
        table = logint.epsilon_scaling_probe(logint.path_family(batch), eps, part="re")
        ok = table.measure_exponent >= 1 / 3 and table.envelope_constant <= 100
        return ok, table.to_dict()
    return _timed(9, "small-value measure exponent >= 1/3 and log envelope C <= 100", body)


def criterion_10(quick: bool = False) -> CriterionResult:
    def body():
        cfg = primescan.ScanConfig(10 ** 6, primescan.THETAS["sqrt2"], degree=2, coeff_bound=10)
        rep = primescan.uniformity_report(cfg)
        ok = rep.exponent_max <= 0.6 and not rep.partial
        return ok, {"exponent_max": rep.exponent_max, "exponent_mean": rep.exponent_mean,
                    "n_polynomials": rep.n_polynomials, "max_hits": rep.max_hits.tolist()}
    return _timed(10, "prime-scan dyadic exponent <= 0.6 for d <= 2, |e_j| <= 10", body)


WEIL_SPAN = 12
WEIL_FULL_Q = 31


def weil_shift_tuples(q: int):
    """Distinct shift tuples checked at ``q`` (translation fixes ``m_1 = 0``).

    Every tuple for ``q <= WEIL_FULL_Q``; otherwise shifts in ``[0, WEIL_SPAN]``.
    """
    span = q - 1 if q <= WEIL_FULL_Q else WEIL_SPAN
    for n in range(1, 5):
        for rest in itertools.combinations(range(1, span + 1), n - 1):
            yield (0,) + rest


def criterion_11(quick: bool = False) -> CriterionResult:
    def body():
        worst_gauss = 0.0
        for q in (p for p in range(3, 102) if arith.is_prime(p)):
            table = arith.character_table(q)
            taus = arith.gauss_sums_all(table)
            for a in range(1, q):
                for n in (1, 2, 3):
                    v = abs(arith.hyper_kloosterman_average(table, a, n, taus))
                    worst_gauss = max(worst_gauss, v / (n * q ** ((n - 1) / 2)))
        worst_weil, n_tuples = 0.0, 0
        for q in (p for p in range(3, 501) if arith.is_prime(p)):
            chi = arith.legendre_array(q).astype(float)
            ks = np.arange(q)
            for shifts in weil_shift_tuples(q):
                s = float(np.sum(np.prod(chi[(ks[:, None] + np.array(shifts)) % q], axis=1)))
                worst_weil = max(worst_weil, abs(s) / (4 * math.sqrt(q) + 4))
                n_tuples += 1
        ok = worst_gauss <= 1.0 + 1e-9 and worst_weil <= 1.0
        return ok, {"gauss_max_ratio": worst_gauss, "weil_max_ratio": worst_weil,
                    "weil_tuples": n_tuples}
    return _timed(11, "Gauss-sum average and Weil bounds by enumeration", body)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def run_all(quick: bool = False, only=None, report: Callable | None = None) -> list[CriterionResult]:
    out = []
    for i, fn in CRITERIA.items():
        if only and i not in only:
            continue
        res = fn(quick)
        out.append(res)
        if report is not None:
            report(res)
    return out
