"""Exact mixed moments of the limiting processes and of their finite-q models.

Mixed moments ``E prod_j G(t_j)^{r_j} conj(G(t_j))^{s_j}`` of the truncated
series are pairing sums over index tuples.  For the two models with
independent coefficients the pairing sum factors over ``l`` once written as a
generating function: with linear forms ``S_v = sum_l a_v(l) R(l)``,

    E exp(sum_v z_v S_v) = prod_l E exp(R(l) sum_v z_v a_v(l)),

so the moment is a single coefficient of a product of truncated power series.
For ``steinhaus_k`` the coefficient of matching products ``prod (k - l)`` is
collected in sparse arrays keyed by the integer product.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..arith import TWO_PI, character_table, check_odd_prime, e, gauss_sums_all, legendre_array
from ..charsum import series_coefficient
from .sampling import PathSample, check_model

MAX_ORDER = 8
MAX_L = 40


@dataclass(frozen=True)
class MomentSpec:
    """Points ``t_j`` with exponents ``r_j`` (on G) and ``s_j`` (on conj G)."""

    points: tuple
    r: tuple
    s: tuple

    def __post_init__(self):
        pts = tuple(float(t) for t in self.points)
        r = tuple(int(x) for x in self.r)
        s = tuple(int(x) for x in self.s)
        if not pts:
            raise ValueError("a moment needs at least one point")
        if not (len(pts) == len(r) == len(s)):
            raise ValueError("points, r and s must have equal length")
        if any(x < 0 for x in r + s):
            raise ValueError("exponents must be nonnegative")
        if any(not 0 <= t <= 1 for t in pts):
            raise ValueError("points must lie in [0, 1]")
        if sum(r) + sum(s) > MAX_ORDER:
            raise ValueError(f"r + s exceeds the exact-enumeration ceiling {MAX_ORDER}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)

    @property
    def order(self) -> tuple[int, int]:
        return sum(self.r), sum(self.s)

    @property
    def phase_shift(self) -> float:
        """``T = sum_j (r_j - s_j) t_j``."""
        return sum((a - b) * t for t, a, b in zip(self.points, self.r, self.s))

    def slots(self) -> tuple[list[int], list[int]]:
        """Point index of each unconjugated and each conjugated factor."""
        left = [j for j, n in enumerate(self.r) for _ in range(n)]
        right = [j for j, n in enumerate(self.s) for _ in range(n)]
        return left, right

    def to_dict(self) -> dict:
        return {"points": list(self.points), "r": list(self.r), "s": list(self.s)}

    @classmethod
    def from_dict(cls, d: dict) -> "MomentSpec":
        return cls(tuple(d["points"]), tuple(d["r"]), tuple(d["s"]))


def moment_prefactor(spec: MomentSpec, alpha: float) -> complex:
    """``prod_j (e(alpha t_j)/(2 pi i))^{r_j} conj(...)^{s_j}``."""
    a = 1.0 / (1j * TWO_PI)
    r, s = spec.order
    return complex(e(alpha * spec.phase_shift) * a ** r * np.conj(a) ** s)


def _coefficients(spec: MomentSpec, alpha: float, beta: float, L: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.arange(-L + 1, L)
    c = series_coefficient(m[None, :], np.asarray(spec.points)[:, None], alpha, beta)
    return m, c


class TruncatedSeries:
    """Multivariate power series truncated at per-variable degrees ``caps``."""

    def __init__(self, caps):
        self.caps = tuple(int(c) for c in caps)
        self.shape = tuple(c + 1 for c in self.caps)
        size = int(np.prod(self.shape))
        idx = np.array(list(np.ndindex(*self.shape)), dtype=np.int64).reshape(size, len(self.shape))
        # pairs (a, b) with a + b inside the box, for truncated multiplication
        sums = idx[:, None, :] + idx[None, :, :]
        ok = np.all(sums <= np.asarray(self.caps), axis=2)
        a, b = np.nonzero(ok)
        self._a, self._b = a, b
        self._out = np.ravel_multi_index(tuple(sums[a, b].T), self.shape)
        self.size = size
        self.degrees = idx

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        prod = x[self._a] * y[self._b]
        return (np.bincount(self._out, prod.real, self.size)
                + 1j * np.bincount(self._out, prod.imag, self.size))

    def exp_linear(self, coeffs: np.ndarray) -> np.ndarray:
        """``exp(sum_v coeffs[v] z_v)`` as a flat array."""
        out = np.ones(1, dtype=complex)
        for a, cap in zip(coeffs, self.caps):
            n = np.arange(cap + 1)
            series = a ** n / np.array([math.factorial(int(i)) for i in n])
            out = np.multiply.outer(out, series).ravel()
        return out

    def top(self, series: np.ndarray) -> complex:
        """Coefficient of ``prod z_v^{cap_v}`` times ``prod cap_v!``."""
        scale = math.prod(math.factorial(c) for c in self.caps)
        return complex(series[-1] * scale)


def _independent_moment(model: str, spec: MomentSpec, c: np.ndarray) -> complex:
    """Pairing sum for rademacher / steinhaus_iid without the prefactor."""
    # variables: the r_j copies of G(t_j) then the s_j copies of conj G(t_j)
    caps, forms, conj_flags = [], [], []
    for j in range(len(spec.points)):
        if spec.r[j]:
            caps.append(spec.r[j]); forms.append(c[j]); conj_flags.append(False)
        if spec.s[j]:
            caps.append(spec.s[j]); forms.append(np.conj(c[j])); conj_flags.append(True)
    if not caps:
        return 1.0 + 0j
    ts = TruncatedSeries(caps)
    conj_flags = np.array(conj_flags)
    deg_plain = ts.degrees[:, ~conj_flags].sum(axis=1)
    deg_conj = ts.degrees[:, conj_flags].sum(axis=1)
    if model == "rademacher":
        # E exp(x Y) = cosh x keeps the even total degrees of exp(x)
        mask = (deg_plain + deg_conj) % 2 == 0
    else:
        # E X^a conj(X)^b = [a = b]; forms on conj G already carry conj(c)
        mask = deg_plain == deg_conj
    forms = np.array(forms)
    acc = None
    for l in range(forms.shape[1]):
        factor = ts.exp_linear(forms[:, l]) * mask
        acc = factor if acc is None else ts.multiply(acc, factor)
    return ts.top(acc)


def _product_table(shifts: np.ndarray, weights_per_slot: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Sparse map ``P -> sum prod_i w_i(l_i)`` over tuples with ``prod_i shifts(l_i) = P``.

    ``shifts`` holds the integers ``k - l``; tuples with a zero factor are dropped.
    """
    keep = shifts != 0
    sh = shifts[keep].astype(np.int64)
    keys = np.ones(1, dtype=np.int64)
    vals = np.ones(1, dtype=complex)
    for w in weights_per_slot:
        keys = np.multiply.outer(keys, sh).ravel()
        vals = np.multiply.outer(vals, w[keep]).ravel()
        keys, inv = np.unique(keys, return_inverse=True)
        vals = (np.bincount(inv, vals.real, keys.size)
                + 1j * np.bincount(inv, vals.imag, keys.size))
    return keys, vals


def _steinhaus_k_moment(k: int, spec: MomentSpec, m: np.ndarray, c: np.ndarray) -> complex:
    left, right = spec.slots()
    if len(left) != len(right):
        return 0j
    if not left:
        return 1.0 + 0j
    shifts = k - m
    k1, v1 = _product_table(shifts, [c[j] for j in left])
    k2, v2 = _product_table(shifts, [np.conj(c[j]) for j in right])
    _, i1, i2 = np.intersect1d(k1, k2, assume_unique=True, return_indices=True)
    return complex(np.sum(v1[i1] * v2[i2]))


def theoretical_moment(model: str, k, alpha: float, beta: float, spec: MomentSpec, L: int) -> complex:
    """Truncated pairing sum over indices ``|l| < L`` (exact, no sampling)."""
    check_model(model, k)
    if not 1 <= L <= MAX_L:
        raise ValueError(f"L must lie in [1, {MAX_L}]")
    r, s = spec.order
    if model != "rademacher" and r != s:
        return 0j
    m, c = _coefficients(spec, alpha, beta, L)
    if model == "steinhaus_k":
        core = _steinhaus_k_moment(int(k), spec, m, c)
    else:
        core = _independent_moment(model, spec, c)
    return moment_prefactor(spec, alpha) * core


def brute_force_moment(model: str, k, alpha: float, beta: float, spec: MomentSpec, L: int) -> complex:
    """Direct enumeration of all index tuples (small ``L`` and order only)."""
    check_model(model, k)
    m, c = _coefficients(spec, alpha, beta, L)
    left, right = spec.slots()
    total = 0j
    n_left = len(left)
    for tup in itertools.product(range(len(m)), repeat=len(left) + len(right)):
        a, b = tup[:n_left], tup[n_left:]
        if model == "rademacher":
            counts = np.bincount(np.array(tup, dtype=np.int64), minlength=len(m)) if tup else np.zeros(1)
            ok = bool(np.all(counts % 2 == 0))
        elif model == "steinhaus_iid":
            ok = sorted(a) == sorted(b)
        else:
            pa = math.prod(int(k) - int(m[i]) for i in a)
            pb = math.prod(int(k) - int(m[i]) for i in b)
            ok = len(a) == len(b) and pa == pb and pa != 0
        if ok:
            w = 1.0 + 0j
            for i, j in zip(a, left):
                w *= c[j, i]
            for i, j in zip(b, right):
                w *= np.conj(c[j, i])
            total += w
    return moment_prefactor(spec, alpha) * total


def _mixed_product(values: np.ndarray, spec: MomentSpec) -> np.ndarray:
    """``prod_j v_j^{r_j} conj(v_j)^{s_j}`` along the last axis."""
    out = np.ones(values.shape[:-1], dtype=complex)
    for j in range(len(spec.points)):
        v = values[..., j]
        out = out * v ** spec.r[j] * np.conj(v) ** spec.s[j]
    return out


FINITE_MODELS = ("vary_chi", "vary_k_quadratic")


def finite_q_moment(q: int, model_finite: str, k, alpha: float, beta: float,
                    spec: MomentSpec, L: int) -> complex:
    """Exact average of the truncated finite-q mixed product.

    ``vary_chi`` averages ``tilde F_{k,chi}`` (Gauss-sum factor included)
    over all ``q-1`` characters; ``vary_k_quadratic`` averages the quadratic
    series with ``tau`` removed over all ``q`` shifts ``k``.
    """
    q = check_odd_prime(q)
    if q > 2000:
        raise ValueError("finite_q_moment enumerates exactly and needs q <= 2000")
    if not 1 <= L or not L < q / 4:
        raise ValueError(f"L={L} too large relative to q={q} (need L < q/4)")
    if model_finite not in FINITE_MODELS:
        raise ValueError(f"unknown finite model {model_finite!r}")
    m, c = _coefficients(spec, alpha, beta, L)
    pref = e(alpha * np.asarray(spec.points)) / (1j * TWO_PI)
    if model_finite == "vary_chi":
        if k is None:
            raise ValueError("vary_chi needs k")
        table = character_table(q)
        chars = np.conj(table.matrix(int(k) - m))          # (q-1, 2L-1)
        taus = gauss_sums_all(table) / math.sqrt(q)
        vals = (chars @ c.T) * pref[None, :] * taus[:, None]
    else:
        chi = legendre_array(q).astype(float)
        ks = np.arange(q)
        chars = chi[(ks[:, None] - m[None, :]) % q]       # (q, 2L-1)
        vals = (chars @ c.T) * pref[None, :]
    return complex(np.mean(_mixed_product(vals, spec)))


def shift_correlation(q: int, shifts, chi: np.ndarray | None = None) -> float:
    """``sum_k prod_i chi_q(k - m_i)``.

    When every shift occurs an even number of times the product is 1 except
    at the ``k`` hitting a shift, giving ``q - #distinct``.  Otherwise the sum
    is enumerated.
    """
    shifts = list(shifts)
    if not shifts:
        return float(q)
    _, counts = np.unique(shifts, return_counts=True)
    if np.all(counts % 2 == 0):
        return float(q - len(counts))
    if chi is None:
        chi = legendre_array(q).astype(float)
    ks = np.arange(q)
    return float(np.sum(np.prod(chi[(ks[:, None] - np.asarray(shifts)[None, :]) % q], axis=1)))


def quadratic_moment_closed_form(q: int, alpha: float, beta: float, spec: MomentSpec, L: int) -> complex:
    """``vary_k_quadratic`` moment by expanding the product over index tuples.

    Each tuple contributes its coefficient product times
    ``(1/q) sum_k prod chi_q(k - m_i)``, the correlations being shared by all
    tuples with the same multiset of shifts.  For ``r + s = 2`` this is the
    classical ``q - 1`` / ``-1`` rule.
    """
    q = check_odd_prime(q)
    m, c = _coefficients(spec, alpha, beta, L)
    left, right = spec.slots()
    weights = [c[j] for j in left] + [np.conj(c[j]) for j in right]
    n = len(weights)
    pref = moment_prefactor(spec, alpha)
    if n == 0:
        return pref
    if n == 2:
        w0, w1 = weights
        return pref * complex(q * np.sum(w0 * w1) - np.sum(w0) * np.sum(w1)) / q
    idx = np.indices((len(m),) * n).reshape(n, -1).T
    coeff = np.ones(idx.shape[0], dtype=complex)
    for i, w in enumerate(weights):
        coeff *= w[idx[:, i]]
    keys, inv = np.unique(np.sort(idx, axis=1), axis=0, return_inverse=True)
    chi = legendre_array(q).astype(float)
    corr = np.array([shift_correlation(q, m[row], chi) for row in keys]) / q
    return pref * complex(np.sum(coeff * corr[inv.ravel()]))


def empirical_moment(samples: list[PathSample], spec: MomentSpec) -> tuple[complex, float]:
    """Monte Carlo mean of the mixed product and its standard error."""
    if not samples:
        raise ValueError("no samples")
    grid = samples[0].grid
    ref = (samples[0].model, samples[0].alpha, samples[0].beta, samples[0].k, samples[0].n_trunc)
    for smp in samples:
        if (smp.model, smp.alpha, smp.beta, smp.k, smp.n_trunc) != ref or not np.array_equal(smp.grid, grid):
            raise ValueError("samples must share model, parameters and grid")
    cols = []
    for t in spec.points:
        hit = np.flatnonzero(np.isclose(grid, t, rtol=0, atol=1e-12))
        if hit.size == 0:
            raise ValueError(f"grid does not contain t={t}")
        cols.append(hit[0])
    vals = np.array([smp.values[cols] for smp in samples])
    prods = _mixed_product(vals, spec)
    n = len(prods)
    est = complex(np.mean(prods))
    stderr = float(np.std(prods, ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
    return est, stderr


def off_diagonal_bound(q: int, alpha: float, beta: float, spec: MomentSpec, L: int) -> float:
    """``|r-s| q^{-1/2} prod_j (sum_{|m|<L} |c(m,t_j)|)^{r_j+s_j}``."""
    r, s = spec.order
    _, c = _coefficients(spec, alpha, beta, L)
    sums = np.abs(c).sum(axis=1)
    return abs(r - s) / math.sqrt(q) * float(np.prod(sums ** (np.array(spec.r) + np.array(spec.s))))


def weil_deviation(q: int, shifts) -> float:
    """``|sum_k prod chi_q(k + m_i) - q E[prod Y(m_i)]|`` for a shift tuple."""
    shifts = list(shifts)
    _, counts = np.unique(shifts, return_counts=True) if shifts else (None, np.zeros(0))
    expected = q if np.all(counts % 2 == 0) else 0
    return abs(shift_correlation(q, [-x for x in shifts]) - expected)


def truncation_sup_difference(q: int, alpha: float, beta: float, L: int, n_grid: int = 64) -> float:
    """Average over ``k`` of ``sup_t |G_k(t) - tilde G_k(t)|^2`` for the quadratic character.

    ``G_k = e(alpha k) sqrt(q)/tau F_k`` is evaluated for all ``k`` at once with
    one FFT per grid point.
    """
    from ..charsum import MixedSumParams

    q = check_odd_prime(q)
    params = MixedSumParams(q, 0, alpha, beta)
    n = params.window()
    chi = legendre_array(q).astype(float)
    chi_n = chi[n % q]
    tau = 1.0 if q % 4 == 1 else 1j
    tau *= math.sqrt(q)
    grid = (np.arange(n_grid) + 0.5) / n_grid
    ks = np.arange(q)
    m = np.arange(-L + 1, L)
    chars = chi[(ks[:, None] - m[None, :]) % q]
    worst = np.zeros(q)
    for t in grid:
        folded = np.zeros(q, dtype=complex)
        np.add.at(folded, n % q, chi_n * e(n * t / q))
        exact = np.fft.ifft(folded) * q / tau              # sum_n chi(n) e(n(k+t)/q) / tau
        exact = exact * e(params.alpha * ks)               # G_k drops the e(-alpha k) phase
        c = series_coefficient(m, t, params.alpha, beta)
        approx = e(params.alpha * t) / (1j * TWO_PI) * (chars @ c)
        worst = np.maximum(worst, np.abs(exact - approx) ** 2)
    return float(np.mean(worst))


@dataclass(frozen=True)
class FactorizationCounts:
    congruent: int      # prod (k+m) = prod (k+m') (mod q), nonzero
    integer: int        # equal nonzero integer products
    permutation: int    # m' a permutation of m (with k+m_i never 0)


def shifted_factorization_counts(q: int, k: int, d: int, bound: int) -> FactorizationCounts:
    """Count pairs of ``d``-tuples ``|m_i| <= bound`` with matching shifted products."""
    vals = np.arange(-bound, bound + 1)
    tuples = np.array(list(itertools.product(vals, repeat=d)), dtype=np.int64)
    prods = np.prod(k + tuples, axis=1)
    prods_q = np.ones(len(tuples), dtype=np.int64)
    for i in range(d):
        prods_q = prods_q * ((k + tuples[:, i]) % q) % q
    sorted_keys = [tuple(sorted(t)) for t in tuples.tolist()]
    nz = prods != 0
    congruent = integer = perm = 0
    for a in np.flatnonzero(nz):
        same_q = (prods_q == prods_q[a]) & nz
        same_int = (prods == prods[a]) & nz
        congruent += int(same_q.sum())
        integer += int(same_int.sum())
        perm += sum(1 for b in np.flatnonzero(same_int) if sorted_keys[b] == sorted_keys[a])
    return FactorizationCounts(congruent, integer, perm)
