"""Dirichlet characters modulo an odd prime, Gauss sums and divisor counts.

Characters are indexed by an exponent ``j`` against the smallest primitive
root ``g``: ``chi_j(g**a) = e(j*a/(q-1))``.  ``chi_0`` is principal and
``chi_{(q-1)/2}`` is the Legendre symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * math.pi


class ModulusError(ValueError):
    """Raised for a modulus that is not an odd prime."""


def e(x):
    """The additive character ``exp(2*pi*i*x)`` (numpy aware)."""
    return np.exp(1j * TWO_PI * np.asarray(x, dtype=float))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def check_odd_prime(q: int) -> int:
    if isinstance(q, bool) or int(q) != q:
        raise ModulusError(f"modulus must be an integer, got {q!r}")
    q = int(q)
    if q == 2 or not is_prime(q):
        raise ModulusError(f"modulus must be an odd prime, got {q}")
    return q


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(q: int) -> int:
    q = check_odd_prime(q)
    factors = prime_factors(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // p, q) != 1 for p in factors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


@dataclass(frozen=True)
class CharacterTable:
    """All characters mod ``q`` via a discrete-log table.

    ``dlog[n]`` is the discrete log of ``n`` base ``g`` for ``1 <= n < q``
    (``dlog[0]`` is unused and set to -1).  ``roots[a] = e(a/(q-1))``.
    """

    q: int
    g: int
    dlog: np.ndarray = field(repr=False)
    roots: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.q - 1

    @property
    def quadratic_index(self) -> int:
        return (self.q - 1) // 2

    def check_index(self, j: int) -> int:
        if not 0 <= int(j) < self.q - 1:
            raise IndexError(f"character index {j} out of range for q={self.q}")
        return int(j)

    def values(self, j: int, n) -> np.ndarray:
        """``chi_j(n)`` for integer array ``n`` (any integers, reduced mod q)."""
        j = self.check_index(j)
        n = np.asarray(n, dtype=np.int64) % self.q
        a = (j * self.dlog[n]) % (self.q - 1)
        return np.where(n == 0, 0.0, self.roots[a])

    def __call__(self, j: int, n: int) -> complex:
        return complex(self.values(j, n))

    def matrix(self, n) -> np.ndarray:
        """Values of every character at ``n``: shape ``(q-1, len(n))``."""
        n = np.asarray(n, dtype=np.int64) % self.q
        j = np.arange(self.q - 1, dtype=np.int64)[:, None]
        a = (j * self.dlog[n][None, :]) % (self.q - 1)
        return np.where(n[None, :] == 0, 0.0, self.roots[a])

    def is_even(self, j: int) -> bool:
        # chi(-1) = e(j/2)
        return self.check_index(j) % 2 == 0


@lru_cache(maxsize=64)
def character_table(q: int) -> CharacterTable:
    """Build (and cache) the character table for the odd prime ``q``."""
    q = check_odd_prime(q)
    g = smallest_primitive_root(q)
    dlog = np.full(q, -1, dtype=np.int64)
    x = 1
    for a in range(q - 1):
        dlog[x] = a
        x = x * g % q
    roots = np.exp(1j * TWO_PI * np.arange(q - 1) / (q - 1))
    dlog.setflags(write=False)
    roots.setflags(write=False)
    return CharacterTable(q=q, g=g, dlog=dlog, roots=roots)


def legendre(n: int, q: int) -> int:
    """Legendre symbol ``(n|q)`` by Euler's criterion."""
    q = check_odd_prime(q)
    n %= q
    if n == 0:
        return 0
    return 1 if pow(n, (q - 1) // 2, q) == 1 else -1


def legendre_array(q: int) -> np.ndarray:
    """``(n|q)`` for ``n = 0..q-1`` as an int8 array."""
    q = check_odd_prime(q)
    out = -np.ones(q, dtype=np.int8)
    out[0] = 0
    out[(np.arange(1, q, dtype=np.int64) ** 2) % q] = 1
    return out


@dataclass(frozen=True)
class GaussSum:
    value: complex
    q: int
    j: int


def gauss_sum(table: CharacterTable, j: int) -> GaussSum:
    """``tau(chi_j) = sum_n chi_j(n) e(n/q)`` by direct summation."""
    n = np.arange(1, table.q)
    value = complex(np.sum(table.values(j, n) * e(n / table.q)))
    return GaussSum(value=value, q=table.q, j=int(j))


def gauss_sums_all(table: CharacterTable) -> np.ndarray:
    """Gauss sums of every character, indexed by ``j``.

    ``tau(chi_j) = sum_a e(j a/(q-1)) e(g^a/q)``, a length ``q-1`` DFT.
    """
    q = table.q
    powers = np.empty(q - 1, dtype=np.int64)
    x = 1
    for a in range(q - 1):
        powers[a] = x
        x = x * table.g % q
    # numpy's ifft carries the +i sign convention; undo its 1/n.
    return np.fft.ifft(e(powers / q)) * (q - 1)


def divisor_r(x: int, r: int) -> int:
    """Number of ordered factorizations of ``x`` into ``r`` positive factors."""
    if x < 1 or r < 1:
        raise ValueError("divisor_r needs x >= 1 and r >= 1")
    total = 1
    n = x
    p = 2
    while p * p <= n:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            total *= math.comb(a + r - 1, r - 1)
        p += 1
    if n > 1:
        total *= r
    return total


def hyper_kloosterman_average(table: CharacterTable, a: int, n: int,
                              taus: np.ndarray | None = None) -> complex:
    """``(1/(q-1)) sum_chi chi(a) tau(chi)^n`` over all characters."""
    if taus is None:
        taus = gauss_sums_all(table)
    chi_a = table.matrix([a])[:, 0]
    return complex(np.mean(chi_a * taus ** n))
