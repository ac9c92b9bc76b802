"""The axiomatic L-function class and a catalog of concrete members.

An :class:`LFunctionInstance` carries the archimedean data (degree, Langlands
parameters kappa_j), the arithmetic conductor, the pole order at s = 1, and a
coefficient source.  Sources are a small tagged union:

* :class:`ZetaSource` - Riemann zeta;
* :class:`CharacterSource` - L(s, chi);
* :class:`ProductSource` - product of L-functions (log-coefficients add);
* :class:`SatakeSource` - a finite table p -> (alpha_1(p), ..., alpha_d(p)).

Two coefficient streams are exposed: ``lambda_f(n)``, the coefficients of
-L'/L (so log L = sum lambda_f(n) / (n^s log n)), and the Dirichlet
coefficients of L itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .dirichlet_chars import DirichletCharacter, characters_mod, factorize, kronecker_character

__all__ = [
    "CharacterSource",
    "ClassAxiomError",
    "CoefficientSource",
    "CoefficientUnavailable",
    "LFunctionInstance",
    "LanglandsParameter",
    "NONNEG_TOL",
    "ProductSource",
    "SatakeSource",
    "ValidationReport",
    "ZetaSource",
    "analytic_conductor",
    "analytic_conductor_at",
    "catalog",
    "dedekind_quadratic",
    "dirichlet_coeff",
    "dirichlet_instance",
    "dirichlet_table",
    "exp_from_lambda",
    "has_real_coefficients",
    "lambda_coeff",
    "lambda_table",
    "product_instance",
    "validate_class_axioms",
    "von_mangoldt_table",
    "zeta_instance",
]

NONNEG_TOL = 1e-12


class CoefficientUnavailable(LookupError):
    """A coefficient was requested at a prime missing from a Satake table."""


class ClassAxiomError(ValueError):
    """An instance violates a hypothesis of the L-function class."""


@dataclass(frozen=True)
class LanglandsParameter:
    kappa: complex

    def __post_init__(self):
        k = complex(self.kappa)
        if not k.real > -1:
            raise ClassAxiomError(f"Langlands parameter real part must exceed -1 (got {k})")
        object.__setattr__(self, "kappa", k)


@dataclass(frozen=True)
class ZetaSource:
    @property
    def degree(self) -> int:
        return 1


@dataclass(frozen=True)
class CharacterSource:
    chi: DirichletCharacter

    @property
    def degree(self) -> int:
        return 1


@dataclass(frozen=True)
class ProductSource:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("product of zero factors")

    @property
    def degree(self) -> int:
        return sum(f.degree for f in self.factors)


@dataclass(frozen=True)
class SatakeSource:
    """Satake parameters on a finite set of primes, ``((p, (alpha_1, ..)), ...)``."""

    primes: tuple

    def __post_init__(self):
        rows = []
        for p, alphas in sorted((int(p), tuple(complex(a) for a in alphas)) for p, alphas in dict(self.primes).items()):
            if len(factorize(p)) != 1 or factorize(p)[0][1] != 1:
                raise ValueError(f"Satake table key {p} is not prime")
            for a in alphas:
                if abs(a) > p * (1 + 1e-12):
                    raise ValueError(f"Satake parameter {a} at p = {p} exceeds |alpha| <= p")
            rows.append((p, alphas))
        if not rows:
            raise ValueError("empty Satake table")
        d = len(rows[0][1])
        if any(len(a) != d for _, a in rows):
            raise ValueError("Satake table rows must all have the same length")
        object.__setattr__(self, "primes", tuple(rows))

    @property
    def degree(self) -> int:
        return len(self.primes[0][1])

    @property
    def table(self) -> dict[int, tuple[complex, ...]]:
        return dict(self.primes)

    @property
    def complete_to(self) -> int:
        """Largest x such that every prime <= x is tabulated."""
        tab = self.table
        x = 1
        for p in _primes_upto(max(tab) + 1):
            if p not in tab:
                return p - 1
            x = p
        return x


CoefficientSource = Union[ZetaSource, CharacterSource, ProductSource, SatakeSource]


def _flatten(src) -> list:
    if isinstance(src, ProductSource):
        return [g for f in src.factors for g in _flatten(f)]
    return [src]


def source_pole_count(src) -> int | None:
    """Order of the pole at s = 1 implied by the source; None if unknown (Satake)."""
    total = 0
    for f in _flatten(src):
        if isinstance(f, ZetaSource):
            total += 1
        elif isinstance(f, CharacterSource):
            total += int(f.chi.is_principal)
        else:
            return None
    return total


@dataclass(frozen=True)
class LFunctionInstance:
    name: str
    degree: int
    conductor: int
    kappas: tuple
    pole_order: int
    root_number: complex
    coeff_source: CoefficientSource = field(compare=True)

    def __post_init__(self):
        ks = tuple(LanglandsParameter(k).kappa for k in self.kappas)
        object.__setattr__(self, "kappas", ks)
        object.__setattr__(self, "root_number", complex(self.root_number))
        if self.degree < 1:
            raise ClassAxiomError("degree must be a positive integer")
        if len(ks) != self.degree:
            raise ClassAxiomError(f"{len(ks)} Langlands parameters given for degree {self.degree}")
        if self.conductor < 1:
            raise ClassAxiomError("conductor must be a positive integer")
        if self.pole_order not in (0, 1):
            raise ClassAxiomError(
                f"pole_order {self.pole_order} not allowed: the zero-free region needs at most a simple pole at s = 1"
            )
        if abs(self.root_number) > 1 + 1e-9:
            raise ClassAxiomError(f"root number {self.root_number} has modulus > 1")
        if self.coeff_source.degree != self.degree:
            raise ClassAxiomError(f"coefficient source has degree {self.coeff_source.degree}, instance says {self.degree}")
        implied = source_pole_count(self.coeff_source)
        if implied is not None and implied != self.pole_order:
            raise ClassAxiomError(f"coefficient source has a pole of order {implied} at s = 1, instance says {self.pole_order}")

    @property
    def factors(self) -> list:
        return _flatten(self.coeff_source)

    @property
    def continuable(self) -> bool:
        """Whether every factor is a zeta or Dirichlet L-function (Hurwitz evaluation)."""
        return all(isinstance(f, (ZetaSource, CharacterSource)) for f in self.factors)


# -- arithmetic tables ---------------------------------------------------------


@lru_cache(maxsize=32)
def _primes_upto(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return tuple(int(p) for p in np.nonzero(sieve)[0])


@lru_cache(maxsize=32)
def _prime_power_table(N: int) -> tuple[np.ndarray, np.ndarray]:
    """(base prime, exponent) for each n <= N; zeros where n is not a prime power."""
    base = np.zeros(N + 1, dtype=np.int64)
    expo = np.zeros(N + 1, dtype=np.int64)
    for p in _primes_upto(N):
        pk, k = p, 1
        while pk <= N:
            base[pk], expo[pk] = p, k
            pk *= p
            k += 1
    return base, expo


def von_mangoldt_table(N: int) -> np.ndarray:
    base, _ = _prime_power_table(N)
    out = np.zeros(N + 1)
    m = base > 0
    out[m] = np.log(base[m])
    return out


def _char_values(chi: DirichletCharacter, N: int) -> np.ndarray:
    return chi.values[np.arange(N + 1) % chi.modulus]


def _lambda_table(src, N: int) -> tuple[np.ndarray, np.ndarray]:
    """(Lambda_f(n), available mask) for 0 <= n <= N."""
    if isinstance(src, ZetaSource):
        return von_mangoldt_table(N).astype(complex), np.ones(N + 1, bool)
    if isinstance(src, CharacterSource):
        return von_mangoldt_table(N) * _char_values(src.chi, N), np.ones(N + 1, bool)
    if isinstance(src, ProductSource):
        tot = np.zeros(N + 1, complex)
        ok = np.ones(N + 1, bool)
        for f in src.factors:
            v, m = _lambda_table(f, N)
            tot += v
            ok &= m
        return tot, ok
    if isinstance(src, SatakeSource):
        base, expo = _prime_power_table(N)
        tab = src.table
        out = np.zeros(N + 1, complex)
        ok = np.ones(N + 1, bool)
        for n in np.nonzero(base)[0]:
            p, k = int(base[n]), int(expo[n])
            if p not in tab:
                ok[n] = False
                continue
            out[n] = sum(a**k for a in tab[p]) * math.log(p)
        return out, ok
    raise TypeError(f"unknown coefficient source {src!r}")


@lru_cache(maxsize=128)
def _lambda_table_cached(src, N: int):
    v, m = _lambda_table(src, N)
    v.setflags(write=False)
    m.setflags(write=False)
    return v, m


def lambda_table(f: LFunctionInstance, N: int, strict: bool = True) -> np.ndarray:
    """Lambda_f(n) for 0 <= n <= N (entries 0 and 1 are zero)."""
    v, m = _lambda_table_cached(f.coeff_source, int(N))
    if strict and not m.all():
        n = int(np.nonzero(~m)[0][0])
        raise CoefficientUnavailable(f"coefficient unavailable at n = {n} for {f.name}: prime missing from Satake table")
    return v


def lambda_coeff(f: LFunctionInstance, n: int) -> complex:
    """Lambda_f(n): the n-th coefficient of -L'/L(f, s)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if n == 1:
        return 0j
    return complex(_lambda_single(f.coeff_source, int(n)))


def _lambda_single(src, n: int) -> complex:
    if isinstance(src, ProductSource):
        return sum(_lambda_single(g, n) for g in src.factors)
    fac = factorize(n)
    if len(fac) != 1:
        return 0j
    p, k = fac[0]
    if isinstance(src, ZetaSource):
        return complex(math.log(p))
    if isinstance(src, CharacterSource):
        return src.chi(n) * math.log(p)
    tab = src.table
    if p not in tab:
        raise CoefficientUnavailable(f"coefficient unavailable at n = {n}: prime {p} missing from Satake table")
    return sum(a**k for a in tab[p]) * math.log(p)


def _complete_homogeneous(alphas: tuple[complex, ...], kmax: int) -> list[complex]:
    """h_0..h_kmax of the alphas (coefficients of prod (1 - a x)^-1)."""
    h = [1.0 + 0j] + [0j] * kmax
    for a in alphas:
        for k in range(1, kmax + 1):
            h[k] += a * h[k - 1]
    return h


def _dirichlet_table(src, N: int) -> np.ndarray:
    if isinstance(src, ZetaSource):
        out = np.ones(N + 1, complex)
        out[0] = 0
        return out
    if isinstance(src, CharacterSource):
        out = _char_values(src.chi, N).astype(complex)
        out[0] = 0
        return out
    if isinstance(src, ProductSource):
        acc = _dirichlet_table(src.factors[0], N)
        for g in src.factors[1:]:
            acc = _convolve(acc, _dirichlet_table(g, N))
        return acc
    if isinstance(src, SatakeSource):
        tab = src.table
        out = np.zeros(N + 1, complex)
        if N >= 1:
            out[1] = 1
        for n in range(2, N + 1):
            val = 1 + 0j
            for p, k in factorize(n):
                if p not in tab:
                    raise CoefficientUnavailable(f"coefficient unavailable at n = {n}: prime {p} missing from Satake table")
                val *= _complete_homogeneous(tab[p], k)[k]
            out[n] = val
        return out
    raise TypeError(f"unknown coefficient source {src!r}")


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    N = len(a) - 1
    out = np.zeros(N + 1, complex)
    for d in range(1, N + 1):
        if a[d] != 0:
            out[d :: d] += a[d] * b[1 : N // d + 1]
    return out


@lru_cache(maxsize=128)
def _dirichlet_table_cached(src, N: int) -> np.ndarray:
    v = _dirichlet_table(src, N)
    v.setflags(write=False)
    return v


def dirichlet_table(f: LFunctionInstance, N: int) -> np.ndarray:
    """lambda_f(n) for 0 <= n <= N (entry 0 is zero)."""
    return _dirichlet_table_cached(f.coeff_source, int(N))


def dirichlet_coeff(f: LFunctionInstance, n: int) -> complex:
    """lambda_f(n): the n-th Dirichlet coefficient of L(f, s)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return complex(_dirichlet_single(f.coeff_source, int(n)))


def _dirichlet_single(src, n: int) -> complex:
    if isinstance(src, ZetaSource):
        return 1 + 0j
    if isinstance(src, CharacterSource):
        return src.chi(n)
    return _dirichlet_table(src, n)[n]


def exp_from_lambda(lam: np.ndarray) -> np.ndarray:
    """Formal Dirichlet-series exponential of sum Lambda(n) / (n^s log n).

    Uses lambda(n) log n = sum_{d | n, d > 1} Lambda(d) lambda(n / d).
    """
    N = len(lam) - 1
    out = np.zeros(N + 1, complex)
    out[1] = 1
    # acc[n] collects Lambda(d) lambda(n/d) over d | n, d > 1; final once n is reached
    acc = np.zeros(N + 1, complex)
    acc[2:] += lam[2:]
    for n in range(2, N + 1):
        out[n] = acc[n] / math.log(n)
        k = N // n
        if k >= 2 and out[n] != 0:
            acc[2 * n :: n] += out[n] * lam[2 : k + 1]
    return out


# -- class-level quantities ------------------------------------------------------


def analytic_conductor(f: LFunctionInstance) -> float:
    """q(f) * prod (|kappa_j| + 3)."""
    return float(f.conductor * math.prod(abs(k) + 3 for k in f.kappas))


def analytic_conductor_at(f: LFunctionInstance, s: complex) -> float:
    """q(f) * prod (|kappa_j + s| + 3)."""
    return float(f.conductor * math.prod(abs(k + s) + 3 for k in f.kappas))


def has_real_coefficients(f: LFunctionInstance) -> bool:
    for g in f.factors:
        if isinstance(g, CharacterSource) and not g.chi.is_real:
            return False
        if isinstance(g, SatakeSource):
            for _, alphas in g.primes:
                for k in range(1, len(alphas) + 1):
                    if abs(sum(a**k for a in alphas).imag) > 1e-12:
                        return False
    return True


@dataclass
class ValidationReport:
    instance: str
    N: int
    bound_ok: bool
    bound_violations: list[int]
    nonnegative: bool
    negative_at: list[int]
    min_real_part: float
    kappa_ok: bool
    unavailable: list[int]
    conductor_ok: bool

    @property
    def passed(self) -> bool:
        return self.bound_ok and self.nonnegative and self.kappa_ok

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "N": self.N,
            "bound_ok": self.bound_ok,
            "bound_violations": self.bound_violations,
            "nonnegative": self.nonnegative,
            "negative_at": self.negative_at,
            "min_real_part": self.min_real_part,
            "kappa_ok": self.kappa_ok,
            "unavailable": self.unavailable,
            "conductor_ok": self.conductor_ok,
            "passed": self.passed,
        }


def validate_class_axioms(f: LFunctionInstance, N: int) -> ValidationReport:
    """Check |Lambda_f(n)| <= d n log n and Re Lambda_f(n) >= 0 for 2 <= n <= N.

    Unavailable Satake coefficients are listed and skipped.  ``conductor_ok``
    records d < log q(f), required before certification.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    lam, avail = _lambda_table_cached(f.coeff_source, int(N))
    n = np.arange(N + 1)
    sel = (n >= 2) & avail
    bound = f.degree * n * np.log(np.maximum(n, 1))
    over = sel & (np.abs(lam) > bound * (1 + 1e-12))
    neg = sel & (lam.real < -NONNEG_TOL)
    re = lam.real[sel]
    return ValidationReport(
        instance=f.name,
        N=int(N),
        bound_ok=not over.any(),
        bound_violations=[int(x) for x in np.nonzero(over)[0][:20]],
        nonnegative=not neg.any(),
        negative_at=[int(x) for x in np.nonzero(neg)[0][:20]],
        min_real_part=float(re.min()) if re.size else 0.0,
        kappa_ok=all(k.real > -1 for k in f.kappas),
        unavailable=[int(x) for x in np.nonzero((n >= 2) & ~avail & (_prime_power_table(int(N))[0] > 0))[0][:20]],
        conductor_ok=f.degree < math.log(analytic_conductor(f)),
    )


# -- catalog -----------------------------------------------------------------------


def zeta_instance() -> LFunctionInstance:
    return LFunctionInstance("zeta", 1, 1, (0,), 1, 1, ZetaSource())


def dirichlet_instance(chi: DirichletCharacter, name: str | None = None) -> LFunctionInstance:
    """L(s, chi); conductor is that of chi, kappa is its parity."""
    if chi.is_principal and chi.modulus == 1:
        return zeta_instance()
    return LFunctionInstance(
        name or f"L_chi_{chi.label()}",
        1,
        chi.conductor,
        (chi.parity,),
        int(chi.is_principal),
        1,
        CharacterSource(chi),
    )


def product_instance(name: str, *parts: LFunctionInstance) -> LFunctionInstance:
    rn = 1 + 0j
    for p in parts:
        rn *= p.root_number
    return LFunctionInstance(
        name,
        sum(p.degree for p in parts),
        math.prod(p.conductor for p in parts),
        tuple(k for p in parts for k in p.kappas),
        sum(p.pole_order for p in parts),
        rn,
        ProductSource(tuple(p.coeff_source for p in parts)),
    )


def dedekind_quadratic(D: int) -> LFunctionInstance:
    """zeta_K for K = Q(sqrt D), D fundamental, as zeta(s) L(s, chi_D)."""
    chi = kronecker_character(D)
    return product_instance(f"dedekind_{D}", zeta_instance(), dirichlet_instance(chi, f"L_kron_{D}"))


def zeta_times(chi: DirichletCharacter, name: str | None = None) -> LFunctionInstance:
    return product_instance(name or f"zeta_chi_{chi.label()}", zeta_instance(), dirichlet_instance(chi))


def catalog(max_modulus: int = 12) -> dict[str, LFunctionInstance]:
    """Named instances: zeta, L(chi_-4) alone, the quadratic Dedekind zeta
    functions of Q(i) and Q(sqrt 5), and zeta * L(chi) for every nonprincipal
    chi mod q <= ``max_modulus``."""
    out = {"zeta": zeta_instance()}
    chi4 = kronecker_character(-4)
    out["chi_-4"] = dirichlet_instance(chi4, "chi_-4")
    out["zeta_chi_-4"] = zeta_times(chi4, "zeta_chi_-4")
    out["zeta_chi_5"] = zeta_times(kronecker_character(5), "zeta_chi_5")
    for D in (-4, 5):
        inst = dedekind_quadratic(D)
        out[inst.name] = inst
    for q in range(2, max_modulus + 1):
        for chi in characters_mod(q):
            if chi.is_principal:
                continue
            inst = zeta_times(chi)
            out[inst.name] = inst
    return out
