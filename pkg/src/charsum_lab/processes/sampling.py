"""Samplers for the limiting random processes.

Each path is ``e(alpha t)/(2 pi i) * sum_{|l|<=N} c(l,t) R(l)`` with

* ``rademacher``: ``R(l) = Y(l)`` independent uniform signs,
* ``steinhaus_iid``: ``R(l) = X(l)`` independent uniform unit complex numbers,
* ``steinhaus_k``: ``R(l) = X * W(k-l)`` with ``W`` a completely multiplicative
  Steinhaus function, ``W(0) = 0`` and ``W(-n) = W(-1) W(n)``.

Random values come from Philox streams keyed by ``(seed, sample index,
domain)`` and are consumed in a fixed order (``l = 0, 1, -1, 2, -2, ...`` and
primes in increasing order), so raising ``N`` extends a realization instead of
reshuffling it.

Evaluation splits the series at ``|l| = HEAD``: the head is summed directly and
the tail ``sum_{|l|>HEAD} R(l) e(gamma l)/(l+t)`` is expanded in powers of
``t/l``, which costs ``O(N)`` once per path instead of ``O(N)`` per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..arith import TWO_PI, e
from ..charsum import series_coefficient

MODELS = ("steinhaus_k", "steinhaus_iid", "rademacher")
HEAD = 16
TAYLOR_TERMS = 16  # (1/17)**16 ~ 2e-20 relative truncation of the tail expansion

_DOMAIN_L, _DOMAIN_PRIME, _DOMAIN_SCALAR = 0, 1, 2


class ModelError(ValueError):
    pass


def check_model(model: str, k) -> None:
    if model not in MODELS:
        raise ModelError(f"unknown model {model!r}; expected one of {MODELS}")
    if (model == "steinhaus_k") != (k is not None):
        raise ModelError("k is required for steinhaus_k and forbidden otherwise")


def _uniforms(seed: int, index: int, domain: int, n: int) -> np.ndarray:
    key = np.random.SeedSequence([int(seed), int(index), domain]).generate_state(2, np.uint64)
    raw = np.random.Philox(key=key).random_raw(n)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def _interleaved_to_l(n_trunc: int) -> np.ndarray:
    """Position of ``l = -N..N`` in the stream order ``0, 1, -1, 2, -2, ...``."""
    l = np.arange(-n_trunc, n_trunc + 1)
    return np.where(l > 0, 2 * l - 1, -2 * l)


def _primes_upto(m: int) -> np.ndarray:
    if m < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(m + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(m ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def multiplicative_angles(m: int, prime_angles: np.ndarray) -> np.ndarray:
    """Angles ``a[n]`` with ``W(n) = e(a[n])`` for ``0 <= n <= m`` (``a[0]`` unused)."""
    primes = _primes_upto(m)
    angles = np.zeros(m + 1)
    for p, theta in zip(primes, prime_angles[: len(primes)]):
        pk = p
        while pk <= m:
            angles[pk::pk] += theta
            pk *= p
    return angles % 1.0


def draw_coefficients(model: str, k, n_trunc: int, seed: int, index: int = 0) -> np.ndarray:
    """Random weights ``R(l)`` for ``l = -N..N`` of one realization."""
    check_model(model, k)
    order = _interleaved_to_l(n_trunc)
    if model == "rademacher":
        u = _uniforms(seed, index, _DOMAIN_L, 2 * n_trunc + 1)
        return np.where(u[order] < 0.5, -1.0, 1.0).astype(complex)
    if model == "steinhaus_iid":
        u = _uniforms(seed, index, _DOMAIN_L, 2 * n_trunc + 1)
        return e(u[order])
    # steinhaus_k
    k = int(k)
    m = abs(k) + n_trunc
    n_primes = len(_primes_upto(m))
    prime_angles = _uniforms(seed, index, _DOMAIN_PRIME, max(n_primes, 1))
    angles = multiplicative_angles(m, prime_angles)
    x_angle, sign_u = _uniforms(seed, index, _DOMAIN_SCALAR, 2)
    w_minus_one = -1.0 if sign_u < 0.5 else 1.0
    args = k - np.arange(-n_trunc, n_trunc + 1)
    w = e(angles[np.abs(args)])
    w = np.where(args < 0, w_minus_one * w, w)
    w = np.where(args == 0, 0.0, w)
    return e(x_angle) * w


@dataclass
class PathBatch:
    """A batch of realizations prepared for evaluation at arbitrary ``t``."""

    alpha: float
    beta: float
    n_trunc: int
    head_u: np.ndarray = field(repr=False)   # (B, 2H+1) R(l) e((alpha+beta) l), |l| <= H
    head_v: np.ndarray = field(repr=False)   # (B, 2H+1) R(l) e(alpha l)
    head_r: np.ndarray = field(repr=False)   # (B, 2H+1) R(l)
    tail_u: np.ndarray = field(repr=False)   # (B, J) sum_{|l|>H} R(l) e((alpha+beta) l)/l^{j+1}
    tail_v: np.ndarray = field(repr=False)   # (B, J)

    @classmethod
    def from_coefficients(cls, coeffs: np.ndarray, alpha: float, beta: float) -> "PathBatch":
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        n_trunc = (coeffs.shape[1] - 1) // 2
        head = min(HEAD, n_trunc)
        l = np.arange(-n_trunc, n_trunc + 1)
        mid = slice(n_trunc - head, n_trunc + head + 1)
        lh = l[mid]
        head_r = coeffs[:, mid]
        head_u = head_r * e((alpha + beta) * lh)
        head_v = head_r * e(alpha * lh)
        mask = np.abs(l) > head
        lt = l[mask].astype(float)
        powers = lt[:, None] ** -(np.arange(TAYLOR_TERMS)[None, :] + 1.0)
        rt = coeffs[:, mask]
        tail_u = (rt * e((alpha + beta) * lt)) @ powers
        tail_v = (rt * e(alpha * lt)) @ powers
        return cls(alpha, beta, n_trunc, head_u, head_v, head_r, tail_u, tail_v)

    @property
    def size(self) -> int:
        return self.head_r.shape[0]

    @property
    def head(self) -> int:
        return (self.head_r.shape[1] - 1) // 2

    def series(self, rows, t) -> np.ndarray:
        """``sum_{|l|<=N} c(l,t) R(l)`` for paired ``rows``/``t`` arrays."""
        rows = np.asarray(rows)
        t = np.asarray(t, dtype=float)
        rows, t = np.broadcast_arrays(rows, t)
        out = np.empty(t.shape, dtype=complex)
        flat_r, flat_t, flat_o = rows.ravel(), t.ravel(), out.reshape(-1)
        chunk = 65536
        for s in range(0, flat_t.size, chunk):
            flat_o[s:s + chunk] = self._series_chunk(flat_r[s:s + chunk], flat_t[s:s + chunk])
        return out

    def _series_chunk(self, rows, t):
        h = self.head
        l = np.arange(-h, h + 1)
        regular = (l != 0) & (l != -1)
        lr = l[regular].astype(float)
        inv = 1.0 / (lr[None, :] + t[:, None])
        su = np.einsum("nl,nl->n", inv, self.head_u[rows][:, regular])
        sv = np.einsum("nl,nl->n", inv, self.head_v[rows][:, regular])
        if self.tail_u.size:
            mt = (-t)[:, None] ** np.arange(TAYLOR_TERMS)[None, :]
            su = su + np.einsum("nj,nj->n", mt, self.tail_u[rows])
            sv = sv + np.einsum("nj,nj->n", mt, self.tail_v[rows])
        val = e(self.beta * t) * su - sv
        for li in (0, -1):
            if -h <= li <= h:
                val = val + series_coefficient(li, t, self.alpha, self.beta) * self.head_r[rows, li + h]
        return val

    def evaluate(self, rows, t) -> np.ndarray:
        """Process values ``e(alpha t)/(2 pi i) * series``."""
        t = np.asarray(t, dtype=float)
        return e(self.alpha * t) / (1j * TWO_PI) * self.series(rows, t)

    def evaluate_grid(self, grid) -> np.ndarray:
        """Values of every path on a shared grid, shape ``(B, len(grid))``."""
        grid = np.asarray(grid, dtype=float)
        rows = np.repeat(np.arange(self.size), grid.size)
        return self.evaluate(rows, np.tile(grid, self.size)).reshape(self.size, grid.size)


def direct_path(coeffs: np.ndarray, alpha: float, beta: float, grid) -> np.ndarray:
    """Reference evaluation by summing every term (``O(N * len(grid))``)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n_trunc = (coeffs.size - 1) // 2
    l = np.arange(-n_trunc, n_trunc + 1)
    grid = np.asarray(grid, dtype=float)
    c = series_coefficient(l[None, :], grid[:, None], alpha, beta)
    return e(alpha * grid) / (1j * TWO_PI) * (c @ coeffs)


@dataclass
class PathSample:
    grid: np.ndarray
    values: np.ndarray
    seed: int
    n_trunc: int
    model: str
    alpha: float
    beta: float
    k: int | None = None
    index: int = 0
    tail_bias: float | None = None


def sample_batch(model: str, k, alpha: float, beta: float, n_trunc: int, seed: int,
                 indices) -> PathBatch:
    coeffs = np.stack([draw_coefficients(model, k, n_trunc, seed, i) for i in indices])
    return PathBatch.from_coefficients(coeffs, alpha, beta)


def sample_process(model: str, k, alpha: float, beta: float, n_trunc: int, grid, seed: int,
                   index: int = 0, estimate_bias: bool = False) -> PathSample:
    """One realization of the chosen limiting process on ``grid``."""
    check_model(model, k)
    if n_trunc < 1:
        raise ValueError("truncation N must be at least 1")
    grid = np.asarray(grid, dtype=float)
    if grid.size and (grid.min() < 0 or grid.max() > 1):
        raise ValueError("grid must lie in [0, 1]")
    batch = sample_batch(model, k, alpha, beta, n_trunc, seed, [index])
    values = batch.evaluate_grid(grid)[0]
    bias = tail_bias_estimate(model, k, alpha, beta, n_trunc, grid, seed) if estimate_bias else None
    return PathSample(grid, values, int(seed), int(n_trunc), model, float(alpha), float(beta),
                      None if k is None else int(k), int(index), bias)


def sample_paths(model: str, k, alpha: float, beta: float, n_trunc: int, grid, seed: int,
                 n_samples: int, batch_size: int = 256) -> list[PathSample]:
    grid = np.asarray(grid, dtype=float)
    out = []
    for start in range(0, n_samples, batch_size):
        idx = list(range(start, min(n_samples, start + batch_size)))
        vals = sample_batch(model, k, alpha, beta, n_trunc, seed, idx).evaluate_grid(grid)
        out.extend(PathSample(grid, v, int(seed), int(n_trunc), model, float(alpha), float(beta),
                              None if k is None else int(k), i)
                   for i, v in zip(idx, vals))
    return out


def tail_bias_estimate(model: str, k, alpha: float, beta: float, n_trunc: int, grid,
                       seed: int, pilots: int = 32) -> float:
    """Mean sup-distance between truncations ``N`` and ``2N`` over pilot paths."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        grid = np.linspace(0, 1, 65)
    idx = range(10**9, 10**9 + pilots)  # pilot streams disjoint from sample indices
    big = sample_batch(model, k, alpha, beta, 2 * n_trunc, seed, idx)
    small_coeffs = np.stack([draw_coefficients(model, k, 2 * n_trunc, seed, i) for i in idx])
    small_coeffs[:, : n_trunc] = 0
    small_coeffs[:, 3 * n_trunc + 1:] = 0
    small = PathBatch.from_coefficients(small_coeffs, alpha, beta)
    diff = np.abs(big.evaluate_grid(grid) - small.evaluate_grid(grid))
    return float(np.mean(diff.max(axis=1)))


def second_moment_closed_form(t: float, alpha: float, beta: float, n_terms: int | None = None) -> float:
    """``E|G(t)|^2 = (1/4 pi^2) sum_l |c(l,t)|^2``; exact sum when ``n_terms`` is None.

    For ``beta = 1`` this is ``sin^2(pi t) * pi^2/sin^2(pi t)/pi^2 = 1``.
    """
    if n_terms is None:
        # sum_l 4 sin^2(pi beta (l+t))/(l+t)^2, summed to 10^6 with an averaged tail
        n_terms = 10**6
        l = np.arange(-n_terms, n_terms + 1)
        s = float(np.sum(np.abs(series_coefficient(l, t, alpha, beta)) ** 2))
        s += 2.0 * 2.0 / n_terms  # mean of 4 sin^2 is 2, two tails of ~1/N each
        return s / (4 * math.pi ** 2)
    l = np.arange(-n_terms, n_terms + 1)
    return float(np.sum(np.abs(series_coefficient(l, t, alpha, beta)) ** 2)) / (4 * math.pi ** 2)
