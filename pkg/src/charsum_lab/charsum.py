"""Incomplete mixed character sums and their Poisson-summation series.

The normalized sum is

    F_k(t) = e(-alpha k) q^{-1/2} sum_{alpha q < n < (alpha+beta) q} chi(n) e(n (k+t)/q)

and it equals ``e(-alpha k) e(alpha t) tau(chi)/(2 pi i sqrt q)`` times the
conditionally convergent series ``sum_l c(l,t) conj(chi(k-l))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import TWO_PI, CharacterTable, check_odd_prime, e, gauss_sum

#: absolute constant used to instantiate the O(.) of the truncation error
POISSON_CONSTANT = 100.0


def _dist_to_int(x: float) -> float:
    return abs(x - round(x))


@dataclass(frozen=True)
class MixedSumParams:
    """Parameters ``(q, k, alpha, beta)`` of one normalized sum.

    ``alpha`` is nudged by ``1e-9/q`` when ``alpha*q`` or ``(alpha+beta)*q``
    is an integer, so the window endpoints are never lattice points.
    """

    q: int
    k: int
    alpha: float
    beta: float

    def __post_init__(self):
        q = check_odd_prime(self.q)
        if not 0 <= self.k < q:
            raise ValueError(f"k must lie in [0, q-1], got {self.k}")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        alpha = float(self.alpha)
        for _ in range(4):
            if _dist_to_int(alpha * q) > 1e-12 and _dist_to_int((alpha + self.beta) * q) > 1e-12:
                break
            alpha += 1e-9 / q
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", float(self.beta))

    def window(self) -> np.ndarray:
        """Integers ``n`` with ``alpha q < n < (alpha+beta) q``."""
        lo = self.alpha * self.q
        hi = (self.alpha + self.beta) * self.q
        return np.arange(math.floor(lo) + 1, math.ceil(hi), dtype=np.int64)


@dataclass(frozen=True)
class SeriesCoefficient:
    l: int
    t: float
    value: complex


def series_coefficient(l, t, alpha: float, beta: float):
    """``c(l,t) = e(alpha l)(e(beta(l+t)) - 1)/(l+t)`` with removable points filled.

    Written as ``2 pi i beta e(alpha l) e(beta u/2) sinc(beta u)`` with
    ``u = l + t``, which is exact at ``u = 0`` and free of cancellation.
    """
    l = np.asarray(l, dtype=float)
    u = l + np.asarray(t, dtype=float)
    return (1j * TWO_PI * beta) * e(alpha * l + 0.5 * beta * u) * np.sinc(beta * u)


def mixed_sum(table: CharacterTable, j: int, params: MixedSumParams, theta: float) -> complex:
    """Direct sum ``sum_{alpha q < n < (alpha+beta) q} chi_j(n) e(n theta)``."""
    n = params.window()
    phase = (n.astype(np.longdouble) * np.longdouble(theta)) % 1
    return complex(np.sum(table.values(j, n) * e(phase.astype(float))))


def _window_phase(params: MixedSumParams, t) -> np.ndarray:
    # n (k+t)/q mod 1 with n*k reduced exactly in integers
    n = params.window()
    nk = (n * params.k) % params.q
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return ((nk[None, :] + n[None, :] * t[:, None]) / params.q) % 1.0


def f_normalized(table: CharacterTable, j: int, params: MixedSumParams, t):
    """``F_{k,chi,alpha,beta}(t)``; vectorized over ``t``."""
    scalar = np.ndim(t) == 0
    chi_n = table.values(j, params.window())
    vals = (e(_window_phase(params, t)) @ chi_n) * (
        e(-params.alpha * params.k) / math.sqrt(params.q))
    return complex(vals[0]) if scalar else vals


def truncation_error_bound(params: MixedSumParams, K: int) -> float:
    """Explicit version of the four-term truncation error, constant ``POISSON_CONSTANT``."""
    q = params.q
    sq = math.sqrt(q)
    da = _dist_to_int(params.alpha * q)
    db = _dist_to_int((params.alpha + params.beta) * q)
    terms = (
        sq * math.log(q) / K,
        min(1.0, 1.0 / (K * da)) / sq,
        min(1.0, 1.0 / (K * db)) / sq,
        (1.0 + math.log(K)) / (K * sq),
    )
    return POISSON_CONSTANT * sum(terms)


def poisson_truncated(table: CharacterTable, j: int, params: MixedSumParams, t: float,
                      K: int, tau: complex | None = None) -> tuple[complex, float]:
    """Truncated series ``sum_{|l|<K}`` approximating ``f_normalized``.

    Returns ``(value, error_bound)``.  The series carries the ``e(-alpha k)``
    phase of ``F`` so the two are directly comparable.
    """
    if K <= 1:
        raise ValueError("K must be at least 2")
    if tau is None:
        tau = gauss_sum(table, j).value
    l = np.arange(-K + 1, K, dtype=np.int64)
    c = series_coefficient(l, t, params.alpha, params.beta)
    s = np.sum(c * np.conj(table.values(j, params.k - l)))
    prefactor = e(params.alpha * (t - params.k)) * tau / (2j * math.pi * math.sqrt(params.q))
    return complex(prefactor * s), truncation_error_bound(params, K)
