"""Differential-inequality covers for the quadratic-character series.

With ``A(t) = sum_l c(l,t) conj(chi(k-l))`` the operator
``Delta A = 4 pi^2 beta^2 A' + A'''`` is an absolutely convergent series.  Its
summands are ``e(alpha l) (4 pi^2 beta^2 g'(u) + g'''(u))`` with
``g(u) = (e(beta u) - 1)/u`` and ``u = l + t``; the ``g`` derivatives come
from ``g^(n)(u) = int_0^1 (2 pi i beta)^(n+1) s^n e(beta u s) ds`` near
``u = 0`` and from the recursion ``u g^(n) = c^n e(beta u) - n g^(n-1)``
elsewhere.

A cover certifies that on each interval of a partition of ``[0, 1]`` one of
``|Re Delta A|``, ``|Im Delta A|`` exceeds ``1`` after subtracting the
truncation error and a Lipschitz allowance for the grid.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .arith import TWO_PI, e

GRID_STEP = 1e-4
SAFETY = 0.01
LIPSCHITZ_SAFETY = 10.0
SPECIAL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23)

_S, _SW = np.polynomial.legendre.leggauss(40)
_S = (_S + 1) / 2
_SW = _SW / 2


def g_derivatives(u, beta: float, orders=(1, 3)) -> dict[int, np.ndarray]:
    """``g^(n)(u)`` for ``g(u) = (e(beta u) - 1)/u`` and each ``n`` in ``orders``."""
    u = np.asarray(u, dtype=float)
    c = 1j * TWO_PI * beta
    top = max(orders)
    out = {}
    near = np.abs(u) < 2.0
    far_u = np.where(near, 2.0, u)
    # recursion away from the origin
    ebu = e(beta * far_u)
    rec = {0: (ebu - 1.0) / far_u}
    for n in range(1, top + 1):
        rec[n] = (c ** n * ebu - n * rec[n - 1]) / far_u
    # integral representation near the origin
    un = np.where(near, u, 0.0)
    phase = e(beta * un[..., None] * _S)
    for n in orders:
        integ = (c ** (n + 1)) * ((_S ** n * phase) @ _SW)
        out[n] = np.where(near, integ, rec[n])
    return out


def a_summand(l, t, alpha: float, beta: float):
    """``a(l,t)/(l+t)^4``: the ``l``-th summand of ``Delta A`` for ``chi = 1``.

    Continuous in ``t``; equals ``-4 pi^4 beta^4`` at ``(0, 0)`` and
    ``-4 pi^4 beta^4 e(-alpha)`` at ``(-1, 1)``.
    """
    l = np.asarray(l, dtype=float)
    u = l + np.asarray(t, dtype=float)
    d = g_derivatives(u, beta, (1, 3))
    val = e(alpha * l) * (4 * math.pi ** 2 * beta ** 2 * d[1] + d[3])
    return complex(val) if np.ndim(val) == 0 else val


def a_summand_dt(l, t, alpha: float, beta: float):
    """``d/dt`` of :func:`a_summand`."""
    l = np.asarray(l, dtype=float)
    u = l + np.asarray(t, dtype=float)
    d = g_derivatives(u, beta, (2, 4))
    return e(alpha * l) * (4 * math.pi ** 2 * beta ** 2 * d[2] + d[4])


def a_summand_display(l: int, t: float, alpha: float, beta: float) -> complex:
    """The closed-form display ``a(l,t)/(l+t)^4`` (valid away from ``l + t = 0``)."""
    u = l + t
    pb = math.pi * beta
    a = (12 * pb * u * e(beta * t) * e((alpha + beta) * l) * (pb * u + 1j)
         - e(alpha * l) * (e(beta * u) - 1) * (6 + 4 * pb ** 2 * u ** 2))
    return complex(a / u ** 4)


def truncation_range(M: int) -> np.ndarray:
    """Indices kept by the truncation: ``l = -M, ..., M - 1``.

    Every dropped index has ``|l + t| >= M`` for ``t`` in ``[0, 1]``, which is
    what the zeta-tail bound needs.
    """
    return np.arange(-M, M)


def truncation_error_bound(beta: float, M: int) -> float:
    """``40 pi^2 beta^2 Z(2) + 24 pi beta Z(3) + 24 Z(4)`` with ``Z(s) = sum_{m >= M} m^-s``."""
    if M < 2:
        raise ValueError("M must be at least 2")

    def tail(s):
        return float(special.zeta(s, M))   # Hurwitz zeta: sum_{m >= M} m^{-s}

    return (40 * math.pi ** 2 * beta ** 2 * tail(2) + 24 * math.pi * beta * tail(3)
            + 24 * tail(4))


def delta_a_truncated(chi_values, alpha: float, beta: float, t, M: int):
    """``sum_{l=-M}^{M-1} conj(chi(k-l)) a(l,t)/(l+t)^4``.

    ``chi_values`` maps each ``l`` of the truncation range to ``chi(k-l)``:
    either a dict or an array ordered like :func:`truncation_range`.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    ls = truncation_range(M)
    if isinstance(chi_values, dict):
        missing = [int(l) for l in ls if int(l) not in chi_values]
        if missing:
            raise KeyError(f"missing chi(k-l) for l in {missing}")
        chi = np.array([chi_values[int(l)] for l in ls], dtype=complex)
    else:
        chi = np.asarray(chi_values, dtype=complex)
        if chi.shape != ls.shape:
            raise ValueError(f"expected {ls.size} chi values, got {chi.size}")
    t = np.asarray(t, dtype=float)
    s = a_summand(ls[:, None], t.reshape(1, -1), alpha, beta)
    val = np.conj(chi) @ s
    return complex(val[0]) if t.ndim == 0 else val.reshape(t.shape)


def a_series(coeffs: np.ndarray, alpha: float, beta: float, t) -> np.ndarray:
    """``A(t) = sum_{|l|<=N} c(l,t) w(l)`` for weights ``w`` indexed ``l = -N..N``."""
    from .charsum import series_coefficient

    coeffs = np.asarray(coeffs, dtype=complex)
    n = (coeffs.size - 1) // 2
    l = np.arange(-n, n + 1)
    t = np.asarray(t, dtype=float)
    return series_coefficient(l[None, :], t.reshape(-1, 1), alpha, beta) @ coeffs


def delta_a_series(coeffs: np.ndarray, alpha: float, beta: float, t) -> np.ndarray:
    """``Delta A`` for ``A = sum_{|l|<=N} c(l,t) w(l)`` (weights indexed ``l = -N..N``)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = (coeffs.size - 1) // 2
    l = np.arange(-n, n + 1)
    t = np.asarray(t, dtype=float).reshape(-1)
    out = np.empty(t.size, dtype=complex)
    for s in range(0, t.size, 256):
        out[s:s + 256] = a_summand(l[None, :], t[s:s + 256, None], alpha, beta) @ coeffs
    return out


def delta_numeric(f, t: float, beta: float, h: float = 1e-3) -> complex:
    """``4 pi^2 beta^2 f' + f'''`` by 5-point central differences."""
    pts = t + h * np.arange(-2, 3)
    v = f(pts)
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
    d3 = (-v[0] + 2 * v[1] - 2 * v[3] + v[4]) / (2 * h ** 3)
    return complex(4 * math.pi ** 2 * beta ** 2 * d1 + d3)


# ---------------------------------------------------------------- patterns

@dataclass(frozen=True)
class SignPattern:
    """Character values feeding a cover.

    ``generic``: ``values = (chi(k-1), chi(k), chi(k+1), chi(k+2))``.
    ``special``: ``shift`` is ``0`` (``k = 0``) or ``-1`` (``k = q - 1``),
    ``parity = chi(-1)`` and ``prime_signs`` are ``chi(p)`` for the primes
    up to 23, which fix ``chi`` on ``[-28, 28]``.
    """

    case: str
    values: tuple = ()
    shift: int = 0
    parity: int = 1
    prime_signs: tuple = ()

    def chi(self, n: int) -> int:
        """``chi(n)`` implied by the multiplicative data (special case only)."""
        if n == 0:
            return 0
        sign = self.parity if n < 0 else 1
        n = abs(n)
        for p, s in zip(SPECIAL_PRIMES, self.prime_signs):
            while n % p == 0:
                n //= p
                sign *= s
        if n != 1:
            raise ValueError("argument has a prime factor outside the pattern data")
        return sign

    def chi_values(self, M: int) -> np.ndarray:
        """``chi(k-l)`` ordered like :func:`truncation_range`."""
        ls = truncation_range(M)
        if self.case == "generic":
            if M != 2:
                raise ValueError("generic patterns carry l = -2..1 only (M = 2)")
            # l = -2, -1, 0, 1  <->  chi(k+2), chi(k+1), chi(k), chi(k-1)
            return np.array(self.values[::-1], dtype=float)
        return np.array([self.chi(self.shift - int(l)) for l in ls], dtype=float)

    def label(self) -> str:
        if self.case == "generic":
            return "generic:" + ",".join(f"{v:+d}" for v in self.values)
        k = "0" if self.shift == 0 else "q-1"
        par = "even" if self.parity == 1 else "odd"
        bits = "".join("+" if s > 0 else "-" for s in self.prime_signs)
        return f"special:k={k}:{par}:{bits}"


def generic_patterns() -> list[SignPattern]:
    out = []
    for v in itertools.product((-1, 0, 1), (-1, 1), (-1, 1), (-1, 0, 1)):
        if v[0] == 0 and v[3] == 0:
            continue   # both ends vanish only for q <= 3
        out.append(SignPattern("generic", tuple(v)))
    return out


def special_patterns(shift: int = 0, parity: int = 1) -> list[SignPattern]:
    return [SignPattern("special", shift=shift, parity=parity, prime_signs=tuple(s))
            for s in itertools.product((1, -1), repeat=len(SPECIAL_PRIMES))]


# ---------------------------------------------------------------- covers

@dataclass
class CoverInterval:
    lo: float
    hi: float
    part: str
    margin: float


@dataclass
class CoverCertificate:
    pattern: SignPattern
    intervals: list[CoverInterval]
    grid_step: float
    lipschitz: float
    error_bound: float
    ok: bool = True
    failure: tuple | None = None

    @property
    def min_margin(self) -> float:
        return min((iv.margin for iv in self.intervals), default=float("-inf"))


def lipschitz_constant(alpha: float, beta: float, M: int, n_grid: int = 1001) -> float:
    """``10 * sum_l max_t |d/dt a(l,t)/(l+t)^4|`` over the truncation range (coarse grid)."""
    ls = truncation_range(M)
    t = np.linspace(0.0, 1.0, n_grid)
    d = np.abs(a_summand_dt(ls[:, None], t[None, :], alpha, beta))
    return LIPSCHITZ_SAFETY * float(d.max(axis=1).sum())


@dataclass
class _CoverContext:
    alpha: float
    beta: float
    M: int
    h: float
    grid: np.ndarray
    summands: np.ndarray = field(repr=False)
    lipschitz: float = 0.0
    bound: float = 0.0

    @classmethod
    def build(cls, alpha: float, beta: float, M: int, h: float = GRID_STEP) -> "_CoverContext":
        n = int(round(1.0 / h))
        grid = np.linspace(0.0, 1.0, n + 1)
        ls = truncation_range(M)
        summands = a_summand(ls[:, None], grid[None, :], alpha, beta)
        return cls(alpha, beta, M, 1.0 / n, grid, summands,
                   lipschitz_constant(alpha, beta, M), truncation_error_bound(beta, M))


def _cover_from_values(pattern: SignPattern, vals: np.ndarray, ctx: _CoverContext,
                       perturbation: float = 0.0) -> CoverCertificate:
    slack = ctx.bound + 1.0 + perturbation + ctx.lipschitz * ctx.h / 2
    margins = {"Re": np.abs(vals.real) - slack, "Im": np.abs(vals.imag) - slack}
    good = {p: m > SAFETY for p, m in margins.items()}
    # run_end[p][i]: last index of the run of good points starting at i
    n = vals.size
    run_end = {}
    for p, g in good.items():
        end = np.empty(n, dtype=np.int64)
        nxt = -1
        for i in range(n - 1, -1, -1):
            if g[i]:
                nxt = i if nxt < i else nxt
                end[i] = nxt
            else:
                end[i] = -1
                nxt = -1
        run_end[p] = end
    intervals = []
    i = 0
    # shared midpoints, so adjacent intervals meet exactly
    mid = (ctx.grid[:-1] + ctx.grid[1:]) / 2
    while i < n:
        best = max(("Re", "Im"), key=lambda p: run_end[p][i])
        j = run_end[best][i]
        if j < 0:
            k = i
            while k < n and not (good["Re"][k] or good["Im"][k]):
                k += 1
            lo = 0.0 if i == 0 else mid[i - 1]
            hi = 1.0 if k >= n else mid[k - 1]
            return CoverCertificate(pattern, intervals, ctx.h, ctx.lipschitz, ctx.bound,
                                    ok=False, failure=(lo, hi))
        lo = 0.0 if i == 0 else mid[i - 1]
        hi = 1.0 if j == n - 1 else mid[j]
        intervals.append(CoverInterval(float(lo), float(hi), best,
                                       float(margins[best][i:j + 1].min())))
        i = j + 1
    return CoverCertificate(pattern, intervals, ctx.h, ctx.lipschitz, ctx.bound)


def find_cover(pattern: SignPattern, alpha: float, beta: float, M: int,
               h: float = GRID_STEP, perturbation: float = 0.0,
               context: _CoverContext | None = None) -> CoverCertificate:
    """Fewest-interval cover of ``[0, 1]`` for one pattern.

    Each grid point certifies ``[t - h/2, t + h/2]`` for the part whose
    absolute value exceeds ``1 + error_bound + Lip*h/2 + perturbation`` by
    more than ``SAFETY``; intervals are maximal runs of one part, chosen
    greedily so that each reaches as far right as possible.
    """
    ctx = context or _CoverContext.build(alpha, beta, M, h)
    vals = np.conj(pattern.chi_values(M)).astype(complex) @ ctx.summands
    return _cover_from_values(pattern, vals, ctx, perturbation)


@dataclass
class CoverReport:
    case: str
    alpha: float
    beta: float
    M: int
    error_bound: float
    lipschitz: float
    certificates: list[CoverCertificate]
    wall_time: float

    @property
    def n_certified(self) -> int:
        return sum(c.ok for c in self.certificates)

    @property
    def max_intervals(self) -> int:
        return max((len(c.intervals) for c in self.certificates if c.ok), default=0)

    @property
    def min_margin(self) -> float:
        return min((c.min_margin for c in self.certificates if c.ok), default=float("nan"))

    def summary(self) -> dict:
        groups: dict[str, list[int]] = {}
        for c in self.certificates:
            key = c.pattern.label().rsplit(":", 1)[0] if c.pattern.case == "special" else "generic"
            g = groups.setdefault(key, [0, 0, 0])
            g[0] += 1
            g[1] += int(c.ok)
            g[2] = max(g[2], len(c.intervals) if c.ok else 0)
        return {
            "case": self.case, "alpha": self.alpha, "beta": self.beta, "M": self.M,
            "error_bound": self.error_bound, "lipschitz": self.lipschitz,
            "patterns": len(self.certificates), "certified": self.n_certified,
            "max_intervals": self.max_intervals, "min_margin": self.min_margin,
            "groups": {k: {"patterns": v[0], "certified": v[1], "max_intervals": v[2]}
                       for k, v in groups.items()},
            "failures": [{"pattern": c.pattern.label(), "uncovered": list(c.failure)}
                         for c in self.certificates if not c.ok],
            "wall_time": self.wall_time,
        }


CASES = ("generic_M2", "special_M28")


def verify_all_patterns(case: str, alpha: float = 0.2, beta: float = 1.1,
                        h: float = GRID_STEP, perturbation: float = 0.0,
                        subcases: tuple = ((0, 1), (0, -1), (-1, 1), (-1, -1)),
                        M: int | None = None) -> CoverReport:
    """Run :func:`find_cover` over the whole pattern enumeration of ``case``.

    ``special_M28`` covers ``k = 0`` and ``k = q - 1`` with both parities by
    default; ``subcases`` selects ``(shift, parity)`` pairs.
    """
    start = time.perf_counter()
    if case == "generic_M2":
        M = 2 if M is None else M
        patterns = generic_patterns()
    elif case == "special_M28":
        M = 28 if M is None else M
        patterns = [p for shift, par in subcases for p in special_patterns(shift, par)]
    else:
        raise ValueError(f"case must be one of {CASES}")
    ctx = _CoverContext.build(alpha, beta, M, h)
    chis = np.array([p.chi_values(M) for p in patterns], dtype=complex)
    certs = []
    for start_i in range(0, len(patterns), 128):
        block = np.conj(chis[start_i:start_i + 128]) @ ctx.summands
        for p, vals in zip(patterns[start_i:start_i + 128], block):
            certs.append(_cover_from_values(p, vals, ctx, perturbation))
    return CoverReport(case, alpha, beta, M, ctx.bound, ctx.lipschitz, certs,
                       time.perf_counter() - start)
