"""Log-integrals of oscillating functions, Mahler measures and small-value scaling.

The workhorse is a batched adaptive Gauss-Legendre rule: many functions on
``[0, 1]`` are integrated at once, each panel compares its 16-point estimate
with the sum over its two halves and is split when they disagree or when the
function gets close to zero inside it (where ``log|f|`` stops looking like a
polynomial).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .arith import check_odd_prime, e, legendre_array
from .charsum import MixedSumParams
from .processes.sampling import PathBatch, sample_batch

GL_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
_GL_X = (_GL_X + 1.0) / 2.0
_GL_W = _GL_W / 2.0

DEFAULT_EPS = 1e-4
DEFAULT_N_TRUNC = 10_000
FINITE_Q_BUDGET = 20_000
#: envelope constant used for the reported small-value correction ``C eps^(1/6)``
SMALL_VALUE_CONSTANT = 1.0


class QuadratureError(RuntimeError):
    """Adaptive quadrature hit its refinement limit; ``partial`` holds the estimate."""

    def __init__(self, message: str, partial):
        super().__init__(message)
        self.partial = partial


# ---------------------------------------------------------------- bumps

def _beta_fn(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)


def rho(t):
    """Smooth step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    b0, b1 = _beta_fn(t), _beta_fn(1.0 - np.asarray(t, dtype=float))
    return b0 / (b0 + b1)


def phi(t):
    """Smooth bump equal to 1 on ``[1/3, 2/3]`` and flat to all orders at 0 and 1."""
    t = np.asarray(t, dtype=float)
    return rho(3.0 * t) * rho(3.0 * (1.0 - t))


def w_eps(t, epsilon: float):
    """Smoothed minorant of ``1_{t >= eps}``: 0 below ``eps``, 1 above ``2 eps``."""
    return rho(np.asarray(t, dtype=float) / epsilon - 1.0)


BUMP_KINDS = ("rho", "phi", "w_eps")


@dataclass(frozen=True)
class BumpSpec:
    epsilon: float
    kind: str

    def __post_init__(self):
        if self.kind not in BUMP_KINDS:
            raise ValueError(f"unknown bump {self.kind!r}")
        if self.kind == "w_eps" and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    def __call__(self, x):
        return bump(self.kind, x, self.epsilon)


def bump(kind: str, x, epsilon: float = DEFAULT_EPS):
    if kind == "rho":
        out = rho(x)
    elif kind == "phi":
        out = phi(x)
    elif kind == "w_eps":
        out = w_eps(x, epsilon)
    else:
        raise ValueError(f"unknown bump {kind!r}")
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- quadrature

@dataclass
class QuadratureResult:
    values: np.ndarray
    converged: np.ndarray
    n_evals: int
    n_panels: int


def adaptive_log_quadrature(evaluate: Callable, n_funcs: int, integrand: Callable,
                            tol: float = 1e-8, epsilon: float = DEFAULT_EPS,
                            n_init: int = 16, max_depth: int = 45,
                            max_panels: int = 5_000_000, a: float = 0.0,
                            b: float = 1.0) -> QuadratureResult:
    """Integrate ``integrand(f_i(t))`` over ``[a, b]`` for ``n_funcs`` functions.

    ``evaluate(rows, t)`` returns ``f_rows(t)`` for equally shaped arrays.  A
    panel of width ``h`` is accepted when its two halves reproduce its own
    estimate to ``tol * (h / (b - a) + 1e-3)``, unless the smallest node value
    is below ``10 eps`` and small enough, relative to the slope seen between
    nodes, that ``f`` could vanish inside the panel.
    """
    length = b - a
    rows = np.repeat(np.arange(n_funcs), n_init)
    left = np.tile(a + length * np.arange(n_init) / n_init, n_funcs)
    width = np.full(rows.size, length / n_init)
    depth = np.zeros(rows.size, dtype=np.int64)
    nodes = left[:, None] + width[:, None] * _GL_X[None, :]
    vals = evaluate(np.broadcast_to(rows[:, None], nodes.shape), nodes)
    est = width * (integrand(vals) @ _GL_W)
    n_evals = vals.size
    total = np.zeros(n_funcs)
    converged = np.ones(n_funcs, dtype=bool)
    n_panels = 0
    while rows.size:
        half = width / 2.0
        c_rows = np.concatenate([rows, rows])
        c_left = np.concatenate([left, left + half])
        c_width = np.concatenate([half, half])
        c_nodes = c_left[:, None] + c_width[:, None] * _GL_X[None, :]
        c_vals = evaluate(np.broadcast_to(c_rows[:, None], c_nodes.shape), c_nodes)
        n_evals += c_vals.size
        p = rows.size
        ints = integrand(c_vals)
        c_est = c_width * (ints @ _GL_W)
        refined = c_est[:p] + c_est[p:]
        # a dip is a panel where |f| is small and could reach zero at the observed slope
        mags = np.abs(c_vals)
        slope = np.abs(np.diff(mags, axis=1) / np.diff(c_nodes, axis=1)).max(axis=1)
        slope = np.maximum(slope[:p], slope[p:])
        low = np.minimum(mags[:p].min(axis=1), mags[p:].min(axis=1))
        dip = (low < 10 * epsilon) & (low < 0.5 * slope * width) & (width > 1e-13)
        # the absolute floor keeps rounding in the node positions from driving refinement
        bad = (np.abs(refined - est) > tol * (width / length + 1e-3)) | dip
        stop = ~bad | (depth + 1 >= max_depth)
        np.add.at(total, rows[stop], refined[stop])
        failed = bad & stop
        if failed.any():
            converged[np.unique(rows[failed])] = False
        n_panels += int(stop.sum())
        keep = ~stop
        if n_panels + 2 * keep.sum() > max_panels:
            np.add.at(total, rows[keep], refined[keep])
            converged[np.unique(rows[keep])] = False
            break
        rows = np.concatenate([rows[keep], rows[keep]])
        left = np.concatenate([left[keep], left[keep] + half[keep]])
        width = np.concatenate([half[keep], half[keep]])
        depth = np.concatenate([depth[keep], depth[keep]]) + 1
        est = np.concatenate([c_est[:p][keep], c_est[p:][keep]])
    return QuadratureResult(total, converged, n_evals, n_panels)


def _log_abs(v):
    return np.log(np.maximum(np.abs(v), 1e-300))


def log_integral(f: Callable, tol: float = 1e-8, epsilon: float = DEFAULT_EPS) -> float:
    """``int_0^1 log|f(t)| dt`` for a vectorized callable ``f``."""
    res = adaptive_log_quadrature(lambda rows, t: f(t), 1, _log_abs, tol=tol, epsilon=epsilon)
    if not res.converged[0]:
        raise QuadratureError("log integral did not converge", float(res.values[0]))
    return float(res.values[0])


def log_integral_regularized(f: Callable, epsilon: float, tol: float = 1e-6) -> float:
    """``l_eps(f) = int_0^1 log|f(t)| w_eps(|f(t)|) dt``.

    The integrand vanishes wherever ``|f| <= eps``.  Raises
    :class:`QuadratureError` (carrying the partial value) if refinement stalls.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")

    def integrand(v):
        m = np.abs(v)
        return np.where(m > epsilon, _log_abs(m) * w_eps(m, epsilon), 0.0)

    res = adaptive_log_quadrature(lambda rows, t: f(t), 1, integrand, tol=tol, epsilon=epsilon)
    if not res.converged[0]:
        raise QuadratureError("regularized log integral did not converge", float(res.values[0]))
    return float(res.values[0])


# ---------------------------------------------------------------- finite q

FIXES = ("none", "plus", "minus")


def _finite_q_coefficients(q: int, alpha: float, beta: float, fix: str) -> tuple[np.ndarray, np.ndarray, float]:
    params = MixedSumParams(q, 0, alpha, beta)
    n = params.window()
    coeff = legendre_array(q)[n % q].astype(float)
    if fix != "none":
        hit = np.flatnonzero(n == q)
        if hit.size == 0:
            raise ValueError("the window does not contain n = q, nothing to fix")
        coeff[hit] = 1.0 if fix == "plus" else -1.0
    return n, coeff, params.alpha


def _log_distance_integral(z: np.ndarray) -> np.ndarray:
    """``int_0^1 log|u - z| du`` for complex ``z`` (elementwise)."""
    a, b = np.real(z), np.abs(np.imag(z))

    def prim(v):
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = v * v + b * b
            lg = np.where(r2 > 0, v * np.log(np.where(r2 > 0, r2, 1.0)), 0.0)
            at = np.where(b > 0, 2 * b * np.arctan(v / np.where(b > 0, b, 1.0)), 0.0)
        return 0.5 * (lg - 2 * v + at)

    return prim(1.0 - a) - prim(-a)


class _ArcPolynomial:
    """``S((k + u)/q)`` and its ``u``-derivative for complex ``u`` on chosen arcs."""

    def __init__(self, q: int, n: np.ndarray, coeff: np.ndarray):
        self.q, self.n, self.coeff = q, n, coeff

    def __call__(self, arcs: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # reduce n*k modulo q exactly before forming the phase
        base = (np.outer(arcs, self.n) % self.q) / self.q
        ph = np.exp(2j * math.pi * (base + np.outer(u, self.n) / self.q))
        return ph @ self.coeff, ph @ (self.coeff * 2j * math.pi * self.n / self.q)


def _arc_zeros(poly: _ArcPolynomial, arcs: np.ndarray, starts: list[np.ndarray],
               max_zeros: int = 6) -> np.ndarray:
    """Complex zeros of ``u -> S((k+u)/q)`` near ``[0, 1]`` found by Newton from ``starts``.

    Returns an array ``(len(arcs), max_zeros)`` padded with NaN.
    """
    out = np.full((len(arcs), max_zeros), np.nan + 0j)
    rows = np.concatenate([np.full(len(st), i) for i, st in enumerate(starts)]) if starts else np.zeros(0, int)
    if rows.size == 0:
        return out
    z = np.concatenate(starts).astype(complex)
    for _ in range(30):
        s, ds = poly(arcs[rows], z)
        step = s / np.where(ds != 0, ds, 1.0)
        z = z - np.clip(np.abs(step), 0, 0.05) * np.exp(1j * np.angle(step))
        if np.all(np.abs(step) < 1e-13):
            break
    s, ds = poly(arcs[rows], z)
    good = (np.abs(s) < 1e-9 * math.sqrt(poly.q)) & (np.abs(z.imag) < 0.5) & \
        (z.real > -0.5) & (z.real < 1.5)
    for i in np.unique(rows[good]):
        zs = z[good & (rows == i)]
        uniq = []
        for zz in zs:
            if all(abs(zz - w) > 1e-9 for w in uniq):
                uniq.append(zz)
        uniq = uniq[:max_zeros]
        out[i, :len(uniq)] = uniq
    return out


def mahler_finite_q(q: int, alpha: float, beta: float, littlewood_fix: str = "none",
                    tol: float = 1e-7, max_level: int = 9, epsilon: float = DEFAULT_EPS,
                    budget: int = FINITE_Q_BUDGET, zero_level: int = 4,
                    loose_tol: float = 1e-5) -> float:
    """``(1/q) sum_k int_0^1 log|F_k(t)| dt - log(beta)/2`` for the quadratic character.

    Uses ``|F_k(t)| = q^{-1/2} |S((k+t)/q)|`` with ``S(x) = sum chi(n) e(n x)``
    over the window.  Composite 16-point rules with ``2^level`` panels per arc
    ``[k/q, (k+1)/q]`` are evaluated for all arcs at once by FFTs of length
    ``q``; an arc is settled once two consecutive levels agree to ``tol``.
    Arcs still open at ``zero_level`` have the complex zeros ``z`` of
    ``u -> S((k+u)/q)`` near them located by Newton's method, and
    ``log|u - z|`` (integrated in closed form) is subtracted so that the rule
    only sees an analytic remainder.  Arcs open after ``max_level`` are taken
    at the finest level if it agrees with the previous one to ``loose_tol``
    and otherwise finished by adaptive quadrature with direct evaluation.
    ``littlewood_fix`` puts ``+1`` or ``-1`` at ``n = q``, i.e. adds
    ``+-e(-alpha k + t)/sqrt(q)`` to ``F_k``.
    """
    q = check_odd_prime(q)
    if q > budget:
        raise ValueError(f"q={q} exceeds the direct-evaluation budget {budget}")
    if littlewood_fix not in FIXES:
        raise ValueError(f"littlewood_fix must be one of {FIXES}")
    n, coeff, _ = _finite_q_coefficients(q, alpha, beta, littlewood_fix)
    # lay the window out as consecutive blocks of length q for folding
    first = int(n[0]) - int(n[0]) % q
    blocks = -(-(int(n[-1]) + 1 - first) // q)
    full_n = first + np.arange(blocks * q)
    full_c = np.zeros(blocks * q)
    full_c[n - first] = coeff
    scale = math.sqrt(q)
    zeros = None           # (q, Z) complex zeros per arc, NaN padded
    keep_vals = None

    def composite(level, want_vals=None):
        m = 2 ** level
        offs = ((np.arange(m)[:, None] + _GL_X[None, :]) / m).ravel()
        weights = np.tile(_GL_W, m) / m
        acc = np.zeros(q)
        lo = np.full(q, np.inf)
        saved = [] if want_vals is not None else None
        chunk = max(1, 2 ** 22 // full_n.size)
        for s in range(0, offs.size, chunk):
            u = offs[s:s + chunk]
            phase = e(np.outer(u, full_n) / q) * full_c
            folded = phase.reshape(u.size, blocks, q).sum(axis=1)
            vals = np.fft.ifft(folded, axis=1) * q          # (chunk, q): S((k+u)/q)
            logs = _log_abs(vals)
            if zeros is not None:
                dist = np.abs(u[:, None, None] - zeros[None, :, :])
                logs -= np.nansum(np.log(np.where(np.isnan(dist), 1.0, dist)), axis=2)
            acc += weights[s:s + chunk] @ logs
            lo = np.minimum(lo, np.abs(vals).min(axis=0))
            if saved is not None:
                saved.append(np.abs(vals[:, want_vals]))
        if saved is not None:
            return acc, lo, offs, np.concatenate(saved, axis=0)
        return acc, lo

    prev, _ = composite(0)
    result = np.full(q, np.nan)
    pending = np.ones(q, dtype=bool)
    prev_level = prev
    closed_form = np.zeros(q)
    for level in range(1, max_level + 1):
        if level == zero_level and pending.any():
            arcs = np.flatnonzero(pending)
            cur, lo, offs, mags = composite(level, want_vals=arcs)
            starts = []
            for j in range(arcs.size):
                col = mags[:, j]
                mins = np.flatnonzero((col[1:-1] <= col[:-2]) & (col[1:-1] <= col[2:])) + 1
                mins = np.r_[mins, [0, col.size - 1]]
                mins = mins[col[mins] < 0.25 * scale]
                starts.append(offs[mins])
            poly = _ArcPolynomial(q, n, coeff)
            found = _arc_zeros(poly, arcs, starts)
            zeros = np.full((q, found.shape[1]), np.nan + 0j)
            zeros[arcs] = found
            closed_form = np.nansum(_log_distance_integral(zeros), axis=1)
            # restart the level comparison with the singularities removed
            prev, _ = composite(level)
            prev = prev + closed_form
            continue
        cur, lo = composite(level)
        cur = cur + closed_form
        ok = pending & (np.abs(cur - prev) < tol) & ((lo > 10 * epsilon * scale) | (level >= 4))
        result[ok] = cur[ok]
        pending &= ~ok
        prev_level, prev = prev, cur
        if not pending.any():
            break
    late = pending & (np.abs(prev - prev_level) < loose_tol)
    result[late] = prev[late]
    pending &= ~late
    if pending.any():
        arcs = np.flatnonzero(pending)
        poly = _ArcPolynomial(q, n, coeff)

        def direct(rows, t):
            flat_r, flat_t = rows.ravel(), t.ravel()
            out = np.empty(flat_t.size, dtype=complex)
            for s in range(0, flat_t.size, 256):
                out[s:s + 256] = poly(arcs[flat_r[s:s + 256]], flat_t[s:s + 256])[0]
            return out.reshape(t.shape)

        res = adaptive_log_quadrature(direct, arcs.size, _log_abs, tol=tol,
                                      epsilon=epsilon * scale)
        result[pending] = res.values
    return float(np.mean(result) - 0.5 * math.log(q) - 0.5 * math.log(beta))


# ---------------------------------------------------------------- limit

@dataclass
class MahlerEstimate:
    alpha: float
    beta: float
    value: float
    stderr: float
    n_samples: int
    n_trunc: int
    epsilon: float
    seed: int
    mean_log: float = 0.0
    correction_bound: float = 0.0
    tail_bias: float | None = None
    n_unconverged: int = 0
    per_sample: np.ndarray = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "per_sample"}
        return d


def sample_log_integrals(alpha: float, beta: float, n_trunc: int, seed: int, indices,
                         tol: float = 1e-8, epsilon: float = DEFAULT_EPS) -> tuple[np.ndarray, int]:
    """``int_0^1 log|beta^{-1/2} G(t)| dt`` for rademacher paths ``indices``."""
    batch = sample_batch("rademacher", None, alpha, beta, n_trunc, seed, list(indices))
    shift = 0.5 * math.log(beta)
    res = adaptive_log_quadrature(batch.evaluate, batch.size, _log_abs, tol=tol, epsilon=epsilon)
    return res.values - shift, int((~res.converged).sum())


def mahler_limit_estimate(alpha: float, beta: float, n_trunc: int = DEFAULT_N_TRUNC,
                          n_samples: int = 20_000, epsilon: float = DEFAULT_EPS, seed: int = 0,
                          batch_size: int = 128, tol: float = 1e-8,
                          envelope_constant: float = SMALL_VALUE_CONSTANT,
                          progress: Callable | None = None) -> MahlerEstimate:
    """Monte Carlo estimate of ``exp(E int_0^1 log|beta^{-1/2} G_{alpha,beta}(t)| dt)``.

    Each path integral is computed in full (the regularized part plus the
    ``|G| < eps`` part, resolved by refinement), so no correction is applied;
    ``correction_bound = C eps^(1/6)`` is reported alongside for reference.
    """
    if n_samples < 100:
        raise ValueError("need at least 100 samples")
    logs = np.empty(n_samples)
    bad = 0
    for start in range(0, n_samples, batch_size):
        idx = range(start, min(n_samples, start + batch_size))
        vals, nb = sample_log_integrals(alpha, beta, n_trunc, seed, idx, tol, epsilon)
        logs[start:start + len(vals)] = vals
        bad += nb
        if progress is not None:
            progress(start + len(vals), n_samples)
    mean = float(np.mean(logs))
    se_log = float(np.std(logs, ddof=1) / math.sqrt(n_samples))
    value = math.exp(mean)
    return MahlerEstimate(alpha=float(alpha), beta=float(beta), value=value, stderr=value * se_log,
                          n_samples=int(n_samples), n_trunc=int(n_trunc), epsilon=float(epsilon),
                          seed=int(seed), mean_log=mean,
                          correction_bound=envelope_constant * epsilon ** (1 / 6),
                          n_unconverged=bad, per_sample=logs)


# ---------------------------------------------------------------- small values

@dataclass
class ScalingRow:
    epsilon: float
    measure: float
    log_integral: float


@dataclass
class ScalingTable:
    rows: list[ScalingRow]
    measure_exponent: float
    log_exponent: float
    envelope_constant: float

    def to_dict(self) -> dict:
        return {"rows": [r.__dict__ for r in self.rows], "measure_exponent": self.measure_exponent,
                "log_exponent": self.log_exponent, "envelope_constant": self.envelope_constant}


def _small_set(g: Callable, eps_list, n_grid: int) -> list[tuple[float, float]]:
    """Per epsilon: (measure of {g < eps}, int log g over that set) for a scalar ``g >= 0``."""
    grid = np.linspace(0.0, 1.0, n_grid + 1)
    vals = g(grid)
    eps_max = max(eps_list)
    # candidate dips: grid local minima (endpoints included) below a generous threshold
    interior = np.r_[True, vals[1:] <= vals[:-1]] & np.r_[vals[:-1] <= vals[1:], True]
    cand = np.flatnonzero(interior & (vals < 20 * eps_max + 20.0 / n_grid * np.abs(np.gradient(vals, grid)).max()))
    minima = []
    for i in cand:
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n_grid)]
        r = optimize.minimize_scalar(lambda t: float(g(np.array([t]))[0]), bounds=(lo, hi),
                                     method="bounded", options={"xatol": 1e-14})
        tmin, vmin = (r.x, r.fun) if r.fun < vals[i] else (grid[i], vals[i])
        minima.append((float(tmin), float(vmin), i))
    out = []
    for eps in eps_list:
        intervals = []
        for tmin, vmin, i in minima:
            if vmin >= eps:
                continue
            j = i
            while j > 0 and vals[j] < eps:
                j -= 1
            left = 0.0 if vals[j] < eps else optimize.brentq(
                lambda t: float(g(np.array([t]))[0]) - eps, grid[j], tmin, xtol=1e-15)
            j = i
            while j < n_grid and vals[j] < eps:
                j += 1
            right = 1.0 if vals[j] < eps else optimize.brentq(
                lambda t: float(g(np.array([t]))[0]) - eps, tmin, grid[j], xtol=1e-15)
            intervals.append((left, right, tmin))
        intervals.sort()
        merged = []
        for iv in intervals:
            if merged and iv[0] <= merged[-1][1]:
                continue
            merged.append(iv)
        measure = sum(r - l for l, r, _ in merged)
        logint = 0.0
        for l, r, tmin in merged:
            pts = [tmin] if l < tmin < r else None
            val, _ = integrate.quad(
                lambda t: math.log(max(float(g(np.array([t]))[0]), 1e-300)), l, r,
                points=pts, limit=200)
            logint += val
        out.append((measure, logint))
    return out


def epsilon_scaling_probe(family, eps_list, part: str = "abs", n_grid: int = 4096) -> ScalingTable:
    """Small-value statistics of a family of functions on ``[0, 1]``.

    ``family`` is a list of vectorized callables.  For each ``eps`` the table
    holds the family-average Lebesgue measure of ``{|g| < eps}`` and of
    ``int log|g| 1_{|g|<eps}``, where ``g`` is ``f`` (``part="abs"``) or its
    real or imaginary part.  Slopes are least-squares fits in log-log
    coordinates; ``envelope_constant`` is ``max |log integral| / eps^(1/6)``.
    """
    eps_list = [float(x) for x in eps_list]
    if len(eps_list) < 4 or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing with at least 4 entries")
    if part not in ("abs", "re", "im"):
        raise ValueError("part must be abs, re or im")
    pick = {"abs": np.abs, "re": lambda v: np.abs(np.real(v)), "im": lambda v: np.abs(np.imag(v))}[part]
    meas = np.zeros(len(eps_list))
    logs = np.zeros(len(eps_list))
    for f in family:
        g = (lambda f_: (lambda t: pick(f_(t))))(f)
        for i, (m, li) in enumerate(_small_set(g, eps_list, n_grid)):
            meas[i] += m
            logs[i] += li
    meas /= len(family)
    logs /= len(family)
    le = np.log(eps_list)

    def slope(y):
        ok = y > 0
        if ok.sum() < 2:
            return float("nan")
        return float(np.polyfit(le[ok], np.log(y[ok]), 1)[0])

    rows = [ScalingRow(a, float(m), float(li)) for a, m, li in zip(eps_list, meas, logs)]
    envelope = float(np.max(np.abs(logs) / np.asarray(eps_list) ** (1 / 6)))
    return ScalingTable(rows, slope(meas), slope(np.abs(logs)), envelope)


def path_family(batch: PathBatch) -> list[Callable]:
    """Vectorized callables, one per path of ``batch``."""
    return [(lambda i: (lambda t: batch.evaluate(np.full(np.shape(t), i), t)))(i)
            for i in range(batch.size)]
