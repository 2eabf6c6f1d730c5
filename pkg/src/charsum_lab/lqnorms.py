"""L^{2k} norms of shifted Legendre polynomials in the limit.

``phi_k(alpha)^{2k} = (2 pi)^{-2k} int_0^1 E|(e(t) - 1) Z_t|^{2k} dt`` with
``Z_t = sum_m e(m alpha) Y(m)/(m + t)``.  Since
``(e(t) - 1) e(m alpha)/(m + t)`` is the series coefficient ``c(m, t)`` at
``beta = 1``, the inner expectation is a Rademacher pairing sum, evaluated
exactly.  The minimization argument runs through the Lerch-type sum
``sum_m e(m theta)/(m + t)^2`` and its integral representation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .arith import check_odd_prime, e, legendre_array
from .charsum import series_coefficient
from .processes.moments import MomentSpec, _independent_moment

MAX_K = 4
MAX_L = 40
T_NODES = 64


@dataclass(frozen=True)
class LerchEval:
    theta: float
    t: float
    value: complex
    error: float


def _check_t(t: float) -> float:
    t = float(t)
    if not 0.0 < t < 1.0:
        raise ValueError(f"t must lie in the open interval (0, 1), got {t}")
    return t


def _log_weighted(power: float, w: complex) -> tuple[complex, float]:
    """``int_0^1 x^power log(1/x) / (1 - w x) dx`` for ``-1 < power < 0``, ``|w| = 1``."""
    val, err = 0j, 0.0
    for part in (np.real, np.imag):
        # [0, 1/2]: QUADPACK's algebraic-logarithmic weight x^power log(x)
        a, ea = integrate.quad(lambda x: -float(part(1.0 / (1.0 - w * x))), 0.0, 0.5,
                               weight="alg-loga", wvar=(power, 0.0), epsabs=1e-14, epsrel=1e-13,
                               limit=200)

        def smooth(x):
            # log(1/x)/(1 - w x) stays bounded as x -> 1 even for w = 1
            return float(part(x ** power * (-math.log(x)) / (1.0 - w * x)))

        b, eb = integrate.quad(smooth, 0.5, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
        val += (a + b) * (1j if part is np.imag else 1.0)
        err += ea + eb
    return val, err


def lerch_sum(theta: float, t: float) -> LerchEval:
    """``sum_{m in Z} e(m theta)/(m + t)^2`` from its integral representation."""
    t = _check_t(t)
    z = cmath.exp(2j * math.pi * theta)
    first, e1 = _log_weighted(t - 1.0, z)
    second, e2 = _log_weighted(-t, z.conjugate())
    return LerchEval(float(theta), t, first + second / z, e1 + e2)


def lerch_series(theta: float, t: float, n_terms: int = 100_000) -> complex:
    """Direct partial sum over ``|m| <= n_terms`` plus a tail estimate.

    For ``theta`` an integer the tail is summed exactly with the trigamma
    function; otherwise the oscillating tail is ``O(n_terms^-2)`` and dropped.
    """
    from scipy import special

    t = _check_t(t)
    m = np.arange(-n_terms, n_terms + 1)
    s = complex(np.sum(e(theta * m) / (m + t) ** 2))
    if abs(theta - round(theta)) < 1e-15:
        s += float(special.polygamma(1, n_terms + 1 + t) + special.polygamma(1, n_terms + 1 - t))
    return s


def m2r(alpha: float, t: float, r: int) -> float:
    """``M_{2r,t}(alpha) = |sum_m e(2 m alpha)/(m + t)^2|^{2r}``."""
    if r < 1:
        raise ValueError("r must be at least 1")
    return abs(lerch_sum(2.0 * alpha, t).value) ** (2 * r)


@dataclass(frozen=True)
class LerchDecomposition:
    i1: float          # int (x^-t - x^t) log(1/x) / D
    i2: float          # int (x^(t-1) - x^(1-t)) log(1/x) / D
    cos_term: float    # cos(2 pi theta)

    @property
    def terms(self) -> tuple[float, float, float]:
        return self.i1 ** 2, 2 * self.cos_term * self.i1 * self.i2, self.i2 ** 2

    @property
    def total(self) -> float:
        return sum(self.terms)


def lerch_decomposition(theta: float, t: float) -> LerchDecomposition:
    """Real integrals with ``|lerch_sum|^2 = I1^2 + 2 cos(2 pi theta) I1 I2 + I2^2``.

    Here ``D = 1 - 2x cos(2 pi theta) + x^2`` and both integrands are
    nonnegative on ``(0, 1)``; the sum itself is ``I2 + e(-theta) I1``.
    """
    t = _check_t(t)
    c = math.cos(2 * math.pi * theta)

    def integral(p_lo, p_hi):
        # int (x^p_lo - x^p_hi) log(1/x) / D over (0, 1), p_lo < p_hi
        def f(x):
            return (x ** p_lo - x ** p_hi) * -math.log(x) / (1 - 2 * x * c + x * x)
        a, _ = integrate.quad(lambda x: (1 - x ** (p_hi - p_lo)) / (1 - 2 * x * c + x * x) * -1.0,
                              0.0, 0.5, weight="alg-loga", wvar=(p_lo, 0.0), epsabs=1e-14,
                              epsrel=1e-13, limit=200)
        b, _ = integrate.quad(f, 0.5, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
        return a + b

    return LerchDecomposition(integral(-t, t), integral(t - 1, 1 - t), c)


def integrand_values(theta: float, t: float, x) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise integrands of :func:`lerch_decomposition` (for sign checks)."""
    x = np.asarray(x, dtype=float)
    d = 1 - 2 * x * math.cos(2 * math.pi * theta) + x * x
    lg = -np.log(x)
    return (x ** -t - x ** t) * lg / d, (x ** (t - 1) - x ** (1 - t)) * lg / d


# ---------------------------------------------------------------- phi_k

def pairing_moment(alpha: float, t: float, k: int, L: int) -> float:
    """``(2 pi)^{-2k} E|(e(t) - 1) Z_t|^{2k}`` with ``Z_t`` truncated to ``|m| <= L``."""
    m = np.arange(-L, L + 1)
    c = series_coefficient(m, t, alpha, 1.0)[None, :] / (2 * math.pi)
    spec = MomentSpec((t,), (k,), (k,))
    return float(_independent_moment("rademacher", spec, c).real)


_T_X, _T_W = np.polynomial.legendre.leggauss(T_NODES)
_T_X = (_T_X + 1) / 2
_T_W = _T_W / 2


def phi_power(alpha: float, k: int, L: int) -> float:
    """``int_0^1 (2 pi)^{-2k} E|(e(t)-1) Z_t|^{2k} dt`` at truncation ``L``."""
    return float(sum(w * pairing_moment(alpha, t, k, L) for t, w in zip(_T_X, _T_W)))


@dataclass(frozen=True)
class PhiResult:
    alpha: float
    k: int
    L: int
    value: float          # Richardson-corrected phi_k(alpha)
    raw_value: float      # phi_k at truncation L without correction
    tail_estimate: float  # |corrected - raw|


def phi_k_detailed(alpha: float, k: int, L: int = 30) -> PhiResult:
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must lie in [1, {MAX_K}]")
    if not 1 <= L <= MAX_L:
        raise ValueError(f"L must lie in [1, {MAX_L}]")
    p1 = phi_power(alpha, k, L)
    p2 = phi_power(alpha, k, 2 * L)
    corrected = 2 * p2 - p1       # truncation error of the even moments is O(1/L)
    root = 1.0 / (2 * k)
    value = corrected ** root
    raw = p1 ** root
    return PhiResult(float(alpha), k, L, value, raw, abs(value - raw))


def phi_k(alpha: float, k: int, L: int = 30) -> float:
    """``phi_k(alpha)``: the ``2k``-th root of the limiting normalized ``L^{2k}`` power."""
    return phi_k_detailed(alpha, k, L).value


@dataclass
class ArgminResult:
    k: int
    alphas: np.ndarray
    values: np.ndarray
    alpha_star: float
    flat: bool


def argmin_scan(k: int, grid_size: int = 33, L: int = 30, flat_tol: float = 1e-3) -> ArgminResult:
    """Minimize ``phi_k`` over ``alpha in [0, 1/2]`` on a uniform grid.

    ``phi_k`` has period ``1/2`` and is symmetric under ``alpha -> 1/2 - alpha``,
    so only the first half of the grid is evaluated.  A profile varying by
    less than ``flat_tol`` is reported as flat (``k = 1``).
    """
    if grid_size < 17:
        raise ValueError("grid_size must be at least 17")
    alphas = np.linspace(0.0, 0.5, grid_size)
    values = np.empty(grid_size)
    half = (grid_size + 1) // 2
    for i in range(half):
        values[i] = phi_k(alphas[i], k, L)
    values[half:] = values[: grid_size - half][::-1]
    flat = float(values.max() - values.min()) < flat_tol
    return ArgminResult(k, alphas, values, float(alphas[int(np.argmin(values))]), flat)


def finite_q_lq_norm(q: int, k: int, alpha: float) -> float:
    """``q^{-1/2} ||F||_{2k}`` for ``F(t) = sum_{n <= q} ((n + a)/q) e(n t)``, ``a = floor(alpha q)``.

    ``|F|^{2k}`` is a trigonometric polynomial of degree ``k q``, so its mean
    over ``2 k q + 1`` or more equispaced points is exact.
    """
    q = check_odd_prime(q)
    a = math.floor(alpha * q)
    coeffs = legendre_array(q)[(np.arange(1, q + 1) + a) % q].astype(float)
    size = 1 << int(math.ceil(math.log2(2 * k * q + 2)))
    vals = np.fft.fft(np.r_[0.0, coeffs], size)
    mean = float(np.mean(np.abs(vals) ** (2 * k)))
    return mean ** (1 / (2 * k)) / math.sqrt(q)
