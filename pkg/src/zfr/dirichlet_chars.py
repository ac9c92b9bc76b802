"""Dirichlet characters mod q with exact root-of-unity values.

A character is stored as an exponent vector on a fixed set of generators of
(Z/qZ)*.  The generators come from the CRT split of q into prime powers; each
odd prime power contributes one generator (a primitive root), and 2^k for
k >= 3 contributes two, -1 and 5.  Values are kept as integer angle numerators
over the group exponent, so multiplicativity holds exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

__all__ = [
    "CharacterError",
    "DirichletCharacter",
    "UnitGroup",
    "characters_mod",
    "conductor_of",
    "factorize",
    "is_fundamental_discriminant",
    "kronecker_character",
    "kronecker_symbol",
    "unit_group",
]

MAX_MODULUS = 10**6


class CharacterError(ValueError):
    """Domain error for character construction."""


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization, ascending primes."""
    if n < 1:
        raise CharacterError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _primitive_root(p: int, k: int) -> int:
    # a primitive root mod p that is also one mod p^2 works for every p^k
    phi = p - 1
    qs = [r for r, _ in factorize(phi)] if phi > 1 else []
    g = 2 if p > 2 else 1
    while True:
        if all(pow(g, phi // r, p) != 1 for r in qs):
            if k == 1 or pow(g, p - 1, p * p) != 1:
                return g
            return g + p
        g += 1


@dataclass(frozen=True)
class _PrimePowerPart:
    p: int
    k: int
    modulus: int
    gens: tuple[int, ...]
    orders: tuple[int, ...]
    logs: np.ndarray = field(repr=False, compare=False)  # shape (modulus, len(gens)), -1 on non-units


def _part(p: int, k: int) -> _PrimePowerPart:
    m = p**k
    if p == 2:
        if k == 1:
            return _PrimePowerPart(2, 1, 2, (), (), np.zeros((2, 0), dtype=np.int64))
        if k == 2:
            logs = np.full((4, 1), -1, dtype=np.int64)
            logs[1, 0], logs[3, 0] = 0, 1
            return _PrimePowerPart(2, 2, 4, (3,), (2,), logs)
        half = 2 ** (k - 2)
        logs = np.full((m, 2), -1, dtype=np.int64)
        x = 1
        for b in range(half):
            logs[x, 0], logs[x, 1] = 0, b
            logs[m - x, 0], logs[m - x, 1] = 1, b
            x = x * 5 % m
        return _PrimePowerPart(2, k, m, (m - 1, 5), (2, half), logs)
    g = _primitive_root(p, k)
    order = m // p * (p - 1)
    logs = np.full((m, 1), -1, dtype=np.int64)
    x = 1
    for e in range(order):
        logs[x, 0] = e
        x = x * g % m
    return _PrimePowerPart(p, k, m, (g,), (order,), logs)


@dataclass(frozen=True)
class UnitGroup:
    """Structure of (Z/qZ)* as a product of cyclic groups."""

    modulus: int
    parts: tuple[_PrimePowerPart, ...]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(o for part in self.parts for o in part.orders)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.orders) if self.orders else 1

    @cached_property
    def phi(self) -> int:
        return math.prod(self.orders) if self.orders else 1

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """Generators lifted to Z/qZ by CRT (one mod their own part, 1 elsewhere)."""
        out = []
        for part in self.parts:
            rest = self.modulus // part.modulus
            for g in part.gens:
                if rest == 1:
                    out.append(g % self.modulus)
                    continue
                # x = g mod part.modulus, x = 1 mod rest
                inv = pow(rest, -1, part.modulus)
                x = (1 + rest * ((g - 1) * inv % part.modulus)) % self.modulus
                out.append(x)
        return tuple(out)

    @cached_property
    def log_table(self) -> np.ndarray:
        """Array (q, r) of discrete logs on each generator; row is -1 for non-units."""
        n = np.arange(self.modulus)
        cols = [part.logs[n % part.modulus] for part in self.parts]
        table = np.concatenate(cols, axis=1) if cols else np.zeros((self.modulus, 0), dtype=np.int64)
        units = np.gcd(n, self.modulus) == 1
        table[~units] = -1
        return table

    @cached_property
    def unit_mask(self) -> np.ndarray:
        return np.gcd(np.arange(self.modulus), self.modulus) == 1


@lru_cache(maxsize=256)
def unit_group(q: int) -> UnitGroup:
    if not isinstance(q, (int, np.integer)) or q < 1:
        raise CharacterError(f"modulus must be a positive integer, got {q!r}")
    if q > MAX_MODULUS:
        raise CharacterError(f"modulus {q} exceeds supported bound {MAX_MODULUS}")
    q = int(q)
    return UnitGroup(q, tuple(_part(p, k) for p, k in factorize(q)) if q > 1 else ())


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod ``modulus`` labelled by its exponent vector ``index``.

    ``chi(g_i) = exp(2 pi i index[i] / order_i)`` on the generators of
    ``unit_group(modulus)``.
    """

    modulus: int
    index: tuple[int, ...]

    def __post_init__(self):
        orders = self.group.orders
        if len(self.index) != len(orders):
            raise CharacterError(
                f"index {list(self.index)} has length {len(self.index)}, "
                f"modulus {self.modulus} needs {len(orders)}"
            )
        object.__setattr__(self, "index", tuple(int(e) % o for e, o in zip(self.index, orders)))

    @property
    def group(self) -> UnitGroup:
        return unit_group(self.modulus)

    @cached_property
    def angle_table(self) -> np.ndarray:
        """Numerators k_n with chi(n) = exp(2 pi i k_n / exponent); -1 where gcd(n, q) > 1."""
        grp = self.group
        E = grp.exponent
        weights = np.array([e * (E // o) for e, o in zip(self.index, grp.orders)], dtype=np.int64)
        logs = grp.log_table
        k = (logs @ weights) % E if weights.size else np.zeros(self.modulus, dtype=np.int64)
        return np.where(grp.unit_mask, k, -1)

    @cached_property
    def values(self) -> np.ndarray:
        """Complex values on 0..q-1; exact +-1, +-i are snapped."""
        E = self.group.exponent
        k = self.angle_table
        z = np.exp(2j * np.pi * np.where(k >= 0, k, 0) / E)
        z = np.where(k >= 0, z, 0)
        return _snap(z)

    def __call__(self, n: int) -> complex:
        return complex(self.values[int(n) % self.modulus])

    def angle(self, n: int) -> tuple[int, int] | None:
        """Exact value as (numerator, denominator) of the angle over 2 pi, None if chi(n) = 0."""
        k = int(self.angle_table[int(n) % self.modulus])
        if k < 0:
            return None
        E = self.group.exponent
        g = math.gcd(k, E)
        return k // g, E // g

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.index)

    @cached_property
    def is_real(self) -> bool:
        k = self.angle_table
        E = self.group.exponent
        return bool(np.all((k < 0) | ((2 * k) % E == 0)))

    @cached_property
    def parity(self) -> int:
        """0 for even (chi(-1) = 1), 1 for odd."""
        return 0 if self(self.modulus - 1).real > 0 else 1

    @cached_property
    def order(self) -> int:
        E = self.group.exponent
        k = self.angle_table
        g = math.gcd(E, *[int(x) for x in np.unique(k[k >= 0])])
        return E // g

    @cached_property
    def conductor(self) -> int:
        return conductor_of(self)

    def primitive(self) -> DirichletCharacter:
        """The primitive character inducing this one."""
        f = self.conductor
        if f == self.modulus:
            return self
        grp = unit_group(f)
        index = []
        for g, o in zip(grp.generators, grp.orders):
            # lift g to a unit mod q in the same class mod f
            x = g
            while math.gcd(x, self.modulus) != 1:
                x += f
            ang = self.angle(x)
            num, den = ang
            index.append(num * o // den)
        chi = DirichletCharacter(f, tuple(index))
        return chi

    def label(self) -> str:
        return f"{self.modulus}." + ".".join(map(str, self.index)) if self.index else f"{self.modulus}"


def _snap(z: np.ndarray) -> np.ndarray:
    re = np.where(np.abs(z.real) < 1e-15, 0.0, z.real)
    im = np.where(np.abs(z.imag) < 1e-15, 0.0, z.imag)
    re = np.where(np.abs(np.abs(re) - 1) < 1e-15, np.sign(re), re)
    im = np.where(np.abs(np.abs(im) - 1) < 1e-15, np.sign(im), im)
    return re + 1j * im


def characters_mod(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, ordered lexicographically by exponent vector."""
    if q == 0:
        raise CharacterError("modulus 0 is not allowed")
    grp = unit_group(q)
    return [DirichletCharacter(grp.modulus, idx) for idx in itertools.product(*(range(o) for o in grp.orders))]


def conductor_of(chi: DirichletCharacter) -> int:
    """Smallest divisor of the modulus from which chi is induced.

    Computed part by part over the CRT split: on the p^k part the conductor is
    the least p^j with the component trivial on units congruent to 1 mod p^j.
    """
    grp = chi.group
    cond = 1
    pos = 0
    for part in grp.parts:
        r = len(part.orders)
        idx = chi.index[pos : pos + r]
        pos += r
        if all(e == 0 for e in idx):
            continue
        n = np.arange(part.modulus)
        logs = part.logs
        units = logs[:, 0] >= 0 if r else np.ones(part.modulus, bool)
        # component angle over 2 pi, as numerator mod E
        E = math.lcm(*part.orders)
        k = sum(logs[:, i] * (idx[i] * (E // part.orders[i])) for i in range(r)) % E
        for j in range(part.k + 1):
            d = part.p**j
            sel = units & (n % d == 1 % d)
            if np.all(k[sel] == 0):
                cond *= d
                break
    return cond


def kronecker_symbol(D: int, n: int) -> int:
    """Kronecker symbol (D | n)."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 == 1 and D % 8 in (3, 5):
            result = -result
    # Jacobi (D | n) for odd n > 0
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _squarefree(m: int) -> bool:
    return all(k == 1 for _, k in factorize(abs(m))) if abs(m) > 1 else True


def is_fundamental_discriminant(D: int) -> tuple[bool, str]:
    """Return (ok, reason); reason names the failed condition."""
    if D == 0:
        return False, "D must be nonzero"
    if D % 4 == 1:
        if not _squarefree(D):
            return False, f"D = {D} is 1 mod 4 but not squarefree"
        return True, ""
    if D % 4 == 0:
        m = D // 4
        if m % 4 not in (2, 3):
            return False, f"D = 4m with m = {m} not congruent to 2 or 3 mod 4"
        if not _squarefree(m):
            return False, f"D = 4m with m = {m} not squarefree"
        return True, ""
    return False, f"D = {D} is congruent to {D % 4} mod 4 (must be 0 or 1)"


def kronecker_character(D: int) -> DirichletCharacter:
    """The real primitive character n -> (D | n) of modulus |D|."""
    ok, why = is_fundamental_discriminant(D)
    if not ok:
        raise CharacterError(f"not a fundamental discriminant: {why}")
    q = abs(D)
    grp = unit_group(q)
    index = []
    for g, o in zip(grp.generators, grp.orders):
        v = kronecker_symbol(D, g)
        index.append(0 if v == 1 else o // 2)
    chi = DirichletCharacter(q, tuple(index))
    expect = np.array([kronecker_symbol(D, n) for n in range(q)], dtype=float)
    if not np.array_equal(chi.values.real, expect):
        raise AssertionError(f"Kronecker character mismatch for D = {D}")
    return chi
