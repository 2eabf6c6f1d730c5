"""Counting primes p with f(k_p) = 0 mod p for small-coefficient polynomials.

The sequence ``k_p`` is either ``floor(theta p)`` or an explicit list aligned
with the primes in increasing order.  Counts are reported per dyadic range
``[2^j, 2^{j+1})`` clipped to ``[2, x_max]``.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

MAX_X = 10 ** 8
MAX_DEGREE = 4
MAX_COEFF = 10 ** 3
DEFAULT_BUDGET = 2 * 10 ** 9     # tail-tuple x prime evaluations
SEGMENT = 1 << 20
KINDS = ("floor_theta_p", "explicit")
THETAS = {
    "sqrt2": math.sqrt(2.0),
    "golden": (1.0 + math.sqrt(5.0)) / 2.0,
    "e": math.e,
}


class ScanError(ValueError):
    pass


@dataclass(frozen=True)
class ScanConfig:
    x_max: int
    theta: float = THETAS["sqrt2"]
    kind: str = "floor_theta_p"
    degree: int = 2
    coeff_bound: int = 10
    # explicit k_p: array aligned with the primes, or a function of the prime array
    sequence: Sequence[int] | Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, compare=False, repr=False)

    def __post_init__(self):
        if not 2 <= self.x_max <= MAX_X:
            raise ScanError(f"x_max must lie in [2, {MAX_X}]")
        if not 0 <= self.degree <= MAX_DEGREE:
            raise ScanError(f"degree must lie in [0, {MAX_DEGREE}]")
        if not 0 <= self.coeff_bound <= MAX_COEFF:
            raise ScanError(f"coeff_bound must lie in [0, {MAX_COEFF}]")
        if self.kind not in KINDS:
            raise ScanError(f"kind must be one of {KINDS}")
        if self.kind == "explicit" and self.sequence is None:
            raise ScanError("explicit kind needs a sequence")

    def to_dict(self) -> dict:
        return {"x_max": self.x_max, "theta": self.theta, "kind": self.kind,
                "degree": self.degree, "coeff_bound": self.coeff_bound}


def parse_theta(name: str) -> float:
    """Named constant (``sqrt2``, ``golden``, ``e``) or a decimal literal."""
    if name in THETAS:
        return THETAS[name]
    try:
        return float(name)
    except ValueError as exc:
        raise ScanError(f"unknown theta {name!r}") from exc


def primes_upto(n: int) -> np.ndarray:
    """All primes ``<= n`` by a segmented sieve of Eratosthenes."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    root = math.isqrt(n)
    small = np.ones(root + 1, dtype=bool)
    small[:2] = False
    for i in range(2, math.isqrt(root) + 1):
        if small[i]:
            small[i * i:: i] = False
    base = np.flatnonzero(small).astype(np.int64)
    out = [base]
    lo = root + 1
    while lo <= n:
        hi = min(lo + SEGMENT, n + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = max(p * p, -(-lo // p) * p)
            if start >= hi:
                continue
            seg[start - lo:: p] = False
        out.append(np.flatnonzero(seg).astype(np.int64) + lo)
        lo = hi
    return np.concatenate(out)


def floor_theta_p(theta: float, primes: np.ndarray) -> np.ndarray:
    """``floor(theta p)``, with products close to an integer recomputed exactly."""
    prod = theta * primes.astype(float)
    k = np.floor(prod).astype(np.int64)
    risky = np.flatnonzero(np.abs(prod - np.rint(prod)) < 1e-6)
    if risky.size:
        exact = Fraction(theta)
        for i in risky:
            k[i] = math.floor(exact * int(primes[i]))
    return k


def sequence_values(config: ScanConfig, primes: np.ndarray) -> np.ndarray:
    if config.kind == "floor_theta_p":
        return floor_theta_p(config.theta, primes)
    seq = config.sequence
    if callable(seq):
        return np.asarray(seq(primes), dtype=np.int64)
    arr = np.asarray(seq, dtype=np.int64)
    if arr.size < primes.size:
        raise ScanError(f"explicit sequence has {arr.size} terms, needs {primes.size}")
    return arr[: primes.size]


def psi(config: ScanConfig) -> int:
    """Number of distinct values ``k_p`` for ``p <= x_max``."""
    primes = primes_upto(config.x_max)
    return int(np.unique(sequence_values(config, primes)).size)


def dyadic_edges(x_max: int) -> np.ndarray:
    """Range boundaries ``2, 4, 8, ...`` with the last range closed at ``x_max``."""
    j = int(math.floor(math.log2(x_max)))
    edges = [2 ** i for i in range(1, j + 1)]
    return np.array(edges + [x_max + 1], dtype=np.int64)


@dataclass
class DyadicCounts:
    lo: np.ndarray        # range start (inclusive)
    hi: np.ndarray        # range end (exclusive)
    counts: np.ndarray    # hits per range
    n_primes: np.ndarray  # primes per range

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def rows(self) -> list[tuple[int, int, int, int]]:
        return [(int(a), int(b), int(c), int(n))
                for a, b, c, n in zip(self.lo, self.hi, self.counts, self.n_primes)]


def _prepare(config: ScanConfig):
    primes = primes_upto(config.x_max)
    k = sequence_values(config, primes) % primes
    edges = dyadic_edges(config.x_max)
    rng = np.searchsorted(edges, primes, side="right") - 1
    n_primes = np.bincount(rng, minlength=edges.size - 1)
    return primes, k, edges, rng, n_primes


def count_poly_hits(config: ScanConfig, f: Sequence[int]) -> DyadicCounts:
    """Primes with ``f(k_p mod p) = 0 mod p`` per dyadic range.

    ``f`` holds coefficients from the constant term upward.
    """
    coeffs = [int(c) for c in f]
    if not coeffs or all(c == 0 for c in coeffs):
        raise ScanError("f must not be the zero polynomial")
    primes, k, edges, rng, n_primes = _prepare(config)
    val = np.zeros_like(primes)
    for c in reversed(coeffs):        # Horner; operands stay below 10^16
        val = (val * k + c) % primes
    hits = np.bincount(rng[val == 0], minlength=edges.size - 1)
    return DyadicCounts(edges[:-1], edges[1:], hits, n_primes)


def fit_exponent(lo: np.ndarray, counts: np.ndarray, min_x: int = 2 ** 8) -> float:
    """Least-squares slope of ``log(1 + count)`` against ``log X`` over ranges with ``X >= min_x``."""
    mask = lo >= min_x
    if mask.sum() < 2:
        mask = np.ones_like(lo, dtype=bool)
    x = np.log(lo[mask].astype(float))
    y = np.log1p(counts[mask].astype(float))
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class UniformityReport:
    config: ScanConfig
    n_polynomials: int
    lo: np.ndarray
    hi: np.ndarray
    max_hits: np.ndarray
    mean_hits: np.ndarray
    argmax: list[tuple[int, ...]]   # a polynomial attaining max_hits per range
    exponent_max: float             # fitted exponent of max_hits
    exponent_mean: float            # fitted exponent of mean_hits
    partial: bool

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "n_polynomials": self.n_polynomials,
            "partial": self.partial,
            "exponent_max": self.exponent_max,
            "exponent_mean": self.exponent_mean,
            "ranges": [
                {"lo": int(a), "hi": int(b), "max_hits": int(m), "mean_hits": float(u),
                 "argmax": list(p)}
                for a, b, m, u, p in zip(self.lo, self.hi, self.max_hits, self.mean_hits,
                                         self.argmax)
            ],
        }


def _tail_hits(tails: np.ndarray, H: int, primes: np.ndarray, powers: np.ndarray):
    """Hits of ``e0 + tail . (k, k^2, ...)`` over all ``|e0| <= H``.

    Returns ``(tail_index, e0, prime_index)`` triples.  For ``p > 2H`` at most
    one ``e0`` works, namely the representative of ``-tail . k`` in ``[-H, H]``.
    """
    s = (tails @ powers) % primes                 # (T, P)
    r = (-s) % primes
    big = primes > 2 * H
    e0 = np.where(r <= H, r, r - primes)
    ok = big & (np.abs(e0) <= H)
    ti, pi = np.nonzero(ok)
    out_t, out_e, out_p = [ti], [e0[ti, pi]], [pi]
    small = np.flatnonzero(~big)
    if small.size:
        for e in range(-H, H + 1):
            zero = (s[:, small] + e) % primes[small] == 0
            a, b = np.nonzero(zero)
            out_t.append(a)
            out_e.append(np.full(a.size, e, dtype=np.int64))
            out_p.append(small[b])
    return np.concatenate(out_t), np.concatenate(out_e), np.concatenate(out_p)


def uniformity_report(config: ScanConfig, polynomials: Sequence[Sequence[int]] | None = None,
                      budget: int = DEFAULT_BUDGET, threads: int = 1,
                      chunk: int = 2 ** 22) -> UniformityReport:
    """Max and mean hit counts per dyadic range over a polynomial family.

    By default the family is every nonzero polynomial of degree ``<= d`` with
    coefficients in ``[-H, H]``.  When the work exceeds ``budget`` only a prefix
    of the family is processed and the report is flagged partial.
    """
    H, d = config.coeff_bound, config.degree
    primes, k, edges, rng, n_primes = _prepare(config)
    n_ranges = edges.size - 1
    powers = np.empty((d, primes.size), dtype=np.int64)
    acc = np.ones_like(primes)
    for j in range(d):
        acc = acc * k % primes
        powers[j] = acc

    if polynomials is not None:
        polys = np.array([list(p) + [0] * (d + 1 - len(p)) for p in polynomials], dtype=np.int64)
        if polys.size == 0:
            raise ScanError("empty polynomial family")
        if polys.shape[1] != d + 1:
            raise ScanError(f"polynomials must have degree <= {d}")
        polys = polys[np.any(polys != 0, axis=1)]
        if polys.size == 0:
            raise ScanError("empty polynomial family")
        counts, partial = _explicit_counts(polys, primes, k, rng, n_ranges, budget)
    else:
        if 2 * H + 1 <= 1 and d >= 0:
            raise ScanError("empty polynomial family")
        tails = np.array(list(itertools.product(range(-H, H + 1), repeat=d)), dtype=np.int64)
        tails = tails.reshape(-1, d)
        n_all = tails.shape[0]
        max_tails = max(1, budget // max(primes.size, 1))
        partial = n_all > max_tails
        tails = tails[:max_tails]
        width = 2 * H + 1
        counts = np.zeros((tails.shape[0] * width, n_ranges), dtype=np.int64)
        step = max(1, chunk // max(primes.size, 1))
        blocks = [(i, tails[i:i + step]) for i in range(0, tails.shape[0], step)]

        def work(block):
            start, tb = block
            ti, e0, pi = _tail_hits(tb, H, primes, powers)
            return (start + ti) * width + (e0 + H), rng[pi]

        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            for rows, cols in pool.map(work, blocks):
                np.add.at(counts, (rows, cols), 1)
        polys = np.concatenate(
            [np.repeat(tails, width, axis=0)[:, ::-1],
             np.tile(np.arange(-H, H + 1), tails.shape[0])[:, None]], axis=1)[:, ::-1]
        # rows are ordered (tail, e0); columns of polys are (e0, e1, ..., ed)
        keep = np.any(polys != 0, axis=1)
        polys, counts = polys[keep], counts[keep]
        if polys.shape[0] == 0:
            raise ScanError("empty polynomial family")

    max_hits = counts.max(axis=0)
    mean_hits = counts.mean(axis=0)
    argmax = [tuple(int(c) for c in polys[i]) for i in counts.argmax(axis=0)]
    lo = edges[:-1]
    return UniformityReport(config, int(polys.shape[0]), lo, edges[1:], max_hits, mean_hits,
                            argmax, fit_exponent(lo, max_hits), fit_exponent(lo, mean_hits),
                            partial)


def _explicit_counts(polys, primes, k, rng, n_ranges, budget):
    limit = max(1, budget // max(primes.size, 1))
    partial = polys.shape[0] > limit
    polys = polys[:limit]
    counts = np.zeros((polys.shape[0], n_ranges), dtype=np.int64)
    for i, f in enumerate(polys):
        val = np.zeros_like(primes)
        for c in f[::-1]:
            val = (val * k + int(c)) % primes
        counts[i] = np.bincount(rng[val == 0], minlength=n_ranges)
    return counts, partial
