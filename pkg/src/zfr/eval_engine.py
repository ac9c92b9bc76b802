"""Double-precision evaluation of L(f, s), log L and L'/L.

Every continuable instance is a product of zeta and Dirichlet L-functions, so
everything reduces to the Hurwitz zeta function

    zeta(s, a) = sum_{n<N} (n+a)^-s + (N+a)^(1-s)/(s-1) + (N+a)^-s / 2
                 + sum_{k=1}^{m} B_2k/(2k)! s(s+1)...(s+2k-2) (N+a)^(-s-2k+1),

evaluated in vectorized form over arrays of s.  N starts at
max(ceil(|Im s|/2) + 10, 50) and doubles until the last correction term is
below a tenth of the target error.

Derivatives come from the Cauchy integral on a circle, applied to the entire
function (s-1)^r L(s) so the pole at s = 1 never enters the contour.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import bernoulli

from .lfunc_model import (
    CharacterSource,
    LFunctionInstance,
    SatakeSource,
    ZetaSource,
    analytic_conductor_at,
    lambda_table,
    source_pole_count,
)

__all__ = [
    "DomainError",
    "EvalConfig",
    "EvalError",
    "PoleError",
    "SingularNeighborhood",
    "completed_l",
    "direct_series",
    "gamma_factor",
    "hurwitz_zeta",
    "hurwitz_zeta_array",
    "l_and_newton_step",
    "l_value",
    "l_values",
    "log_deriv",
    "log_derivs",
    "log_gamma",
    "log_l",
    "regularized_values",
]

SIGMA_MIN = -1.0
SIGMA_MAX = 4.0
_MAX_N = 1 << 14
_CHUNK = 1 << 21  # max elements of one (S, N, A) power array

# B_2k / (2k)! for k = 1..20
_BERN = np.array([bernoulli(2 * k)[2 * k] / math.factorial(2 * k) for k in range(1, 21)])


class EvalError(ArithmeticError):
    pass


class DomainError(EvalError, ValueError):
    pass


class PoleError(EvalError):
    def __init__(self, msg: str, order: int = 1):
        super().__init__(msg)
        self.order = order


class SingularNeighborhood(EvalError):
    pass


@dataclass(frozen=True)
class EvalConfig:
    em_order: int = 8
    series_terms: int = 0
    target_abs_error: float = 1e-10
    derivative_radius: float = 0.05
    max_direct_terms: int = 1 << 16

    def __post_init__(self):
        if not 2 <= self.em_order <= 20:
            raise ValueError("em_order must lie in [2, 20]")
        if not self.target_abs_error >= 1e-14:
            raise ValueError("target_abs_error must be at least 1e-14")
        if not self.derivative_radius > 0:
            raise ValueError("derivative_radius must be positive")


DEFAULT_CONFIG = EvalConfig()


# -- Hurwitz zeta -----------------------------------------------------------------


def _em_block(s: np.ndarray, a: np.ndarray, N: int, m: int):
    """Euler-Maclaurin pieces for s of shape (S,), a of shape (A,).

    Returns (R, P, last) of shape (S, A) with zeta(s, a) = R + P/(s - 1),
    P = (N + a)^(1-s), and ``last`` the modulus of the final correction term.
    """
    S, A = s.size, a.size
    logs = np.log(np.arange(N)[:, None] + a[None, :])  # (N, A)
    main = np.empty((S, A), complex)
    step = max(1, _CHUNK // max(1, N * A))
    for i in range(0, S, step):
        blk = s[i : i + step, None, None]
        main[i : i + step] = np.exp(-blk * logs[None]).sum(axis=1)
    x = N + a[None, :]
    logx = np.log(x)
    sc = s[:, None]
    xs = np.exp(-sc * logx)
    P = x * xs
    T = sc * xs / x
    corr = _BERN[0] * T
    inv_x2 = 1.0 / (x * x)
    for k in range(1, m):
        T = T * (sc + 2 * k - 1) * (sc + 2 * k) * inv_x2
        corr = corr + _BERN[k] * T
    last = np.abs(_BERN[m - 1] * T)
    return main + 0.5 * xs + corr, P, last


def _initial_n(s: np.ndarray, cfg: EvalConfig) -> int:
    t = float(np.max(np.abs(s.imag))) if s.size else 0.0
    return max(math.ceil(t / 2) + 10, 50, cfg.series_terms)


def _em_parts(s: np.ndarray, a: np.ndarray, cfg: EvalConfig):
    N = _initial_n(s, cfg)
    while True:
        R, P, last = _em_block(s, a, N, cfg.em_order)
        if not last.size or float(last.max()) < cfg.target_abs_error / 10:
            return R, P, N
        if N >= _MAX_N:
            raise EvalError(f"Euler-Maclaurin did not reach {cfg.target_abs_error} with N = {N}")
        N *= 2


def _check_strip(s: np.ndarray):
    if s.size and (np.any(s.real <= SIGMA_MIN) or np.any(s.real > SIGMA_MAX)):
        raise DomainError(f"Re(s) must lie in ({SIGMA_MIN}, {SIGMA_MAX}]")


def hurwitz_zeta_array(s, a, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """zeta(s, a) on the outer grid s (S,) x a (A,); a > 0, a > 1 by recurrence."""
    s = np.atleast_1d(np.asarray(s, complex))
    a = np.atleast_1d(np.asarray(a, float))
    if np.any(a <= 0):
        raise DomainError("Hurwitz parameter a must be positive")
    if s.size and np.any(s.real <= SIGMA_MIN):
        raise DomainError(f"Re(s) must exceed {SIGMA_MIN}")
    if np.any(s == 1):
        raise PoleError("zeta(s, a) has a pole at s = 1")
    shift = np.maximum(np.ceil(a - 1.0), 0).astype(int)  # a = a0 + shift, a0 in (0, 1]
    a0 = a - shift
    R, P, _ = _em_parts(s, a0, cfg)
    out = R + P / (s[:, None] - 1)
    for j in np.nonzero(shift)[0]:
        ks = a0[j] + np.arange(shift[j])
        out[:, j] -= np.exp(-s[:, None] * np.log(ks)[None, :]).sum(axis=1)
    return out


def hurwitz_zeta(s: complex, a: float, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Hurwitz zeta zeta(s, a) for Re(s) > -1, s != 1, a > 0."""
    return complex(hurwitz_zeta_array(np.array([s]), np.array([a]), cfg)[0, 0])


# -- factors ------------------------------------------------------------------------


def _zeta_factor(s: np.ndarray, cfg: EvalConfig, regularized: bool) -> np.ndarray:
    R, P, _ = _em_parts(s, np.array([1.0]), cfg)
    R, P = R[:, 0], P[:, 0]
    if regularized:
        return (s - 1) * R + P
    return R + P / (s - 1)


def _ratio_minus_one(s: np.ndarray, logx: np.ndarray) -> np.ndarray:
    """((N + a)^(1-s) - 1)/(s - 1), stable near s = 1."""
    w = (1 - s)[:, None] * logx[None, :]
    d = (s - 1)[:, None]
    small = np.abs(d) < 1e-12
    safe = np.where(small, 1.0, d)
    return np.where(small, -logx[None, :] * (1 + w / 2), np.expm1(w) / safe)


def _character_factor(chi, s: np.ndarray, cfg: EvalConfig, regularized: bool) -> np.ndarray:
    q = chi.modulus
    if q == 1:
        return _zeta_factor(s, cfg, regularized)
    units = np.nonzero(chi.group.unit_mask)[0]
    units = units[units > 0]
    a = units / q
    w = chi.values[units]
    R, P, N = _em_parts(s, a, cfg)
    qs = np.exp(-s * math.log(q))
    if chi.is_principal:
        if regularized:
            return qs * ((s - 1)[:, None] * R + P).sum(axis=1)
        return qs * (R + P / (s - 1)[:, None]).sum(axis=1)
    # sum of chi over units is 0, so the pole parts cancel exactly
    logx = np.log(N + a)
    centred = _ratio_minus_one(s, logx)
    return qs * ((R + centred) @ w)


def _factor_values(src, s: np.ndarray, cfg: EvalConfig, regularized: bool) -> np.ndarray:
    if isinstance(src, ZetaSource):
        return _zeta_factor(s, cfg, regularized)
    if isinstance(src, CharacterSource):
        return _character_factor(src.chi, s, cfg, regularized)
    raise DomainError("only zeta and Dirichlet factors admit continuation")


def regularized_values(f: LFunctionInstance, s, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """(s - 1)^P L(f, s) on an array, P the number of pole-carrying factors."""
    s = np.atleast_1d(np.asarray(s, complex))
    _check_strip(s)
    out = np.ones(s.shape, complex)
    for g in f.factors:
        out *= _factor_values(g, s, cfg, regularized=True)
    return out


def l_values(f: LFunctionInstance, s, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """L(f, s) on an array of points."""
    s = np.atleast_1d(np.asarray(s, complex))
    if not f.continuable:
        return np.array([l_value(f, z, cfg) for z in s])
    P = source_pole_count(f.coeff_source)
    if P and np.any(s == 1):
        raise PoleError(f"{f.name} has a pole of order {f.pole_order} at s = 1", f.pole_order)
    _check_strip(s)
    out = np.ones(s.shape, complex)
    for g in f.factors:
        out *= _factor_values(g, s, cfg, regularized=False)
    return out


def l_value(f: LFunctionInstance, s: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """L(f, s).  Non-continuable (Satake) instances are evaluated only for Re(s) > 1."""
    s = complex(s)
    if f.continuable and s.real > SIGMA_MAX:
        val, _ = direct_series(f, s, cfg)
        return val
    if f.continuable:
        return complex(l_values(f, np.array([s]), cfg)[0])
    if s.real <= 1:
        raise DomainError(f"{f.name} has no continuation; Re(s) must exceed 1")
    return _satake_euler_value(f, s, cfg)


# -- Dirichlet series ------------------------------------------------------------


def _growth_exponent(f: LFunctionInstance) -> int:
    """e with |Lambda_f(n)| <= d n^e log n: 0 for zeta/Dirichlet, 1 (class bound) otherwise."""
    return 0 if f.continuable else 1


def _log_tail_bound(d: int, e: int, sigma: float, M: int, with_log: bool) -> float:
    """Bound on sum_{n > M} d n^e (log n) n^-sigma (or without the log)."""
    a = sigma - e
    if a <= 1:
        return math.inf
    if with_log:
        return d * M ** (1 - a) * (math.log(M) / (a - 1) + 1 / (a - 1) ** 2)
    return d * M ** (1 - a) / (a - 1)


def _direct_length(f: LFunctionInstance, sigma: float, cfg: EvalConfig, with_log: bool) -> int | None:
    e = _growth_exponent(f)
    M = 64
    while M <= cfg.max_direct_terms:
        if _log_tail_bound(f.degree, e, sigma, M, with_log) <= cfg.target_abs_error / 10:
            return M
        M *= 2
    return None


def direct_series(f: LFunctionInstance, s: complex, cfg: EvalConfig = DEFAULT_CONFIG, terms: int | None = None):
    """L(f, s) = exp(sum Lambda_f(n) / (n^s log n)) truncated, with an absolute error bound.

    Returns (value, bound).
    """
    s = complex(s)
    if s.real <= 1:
        raise DomainError("Dirichlet series requires Re(s) > 1")
    M = terms or _direct_length(f, s.real, cfg, with_log=False) or cfg.max_direct_terms
    lam = lambda_table(f, M)
    n = np.arange(2, M + 1)
    logn = np.log(n)
    logL = complex(np.sum(lam[2:] / logn * np.exp(-s * logn)))
    tail = _log_tail_bound(f.degree, _growth_exponent(f), s.real, M, with_log=False)
    val = cmath.exp(logL)
    return val, abs(val) * math.expm1(tail) if math.isfinite(tail) else math.inf


def _satake_euler_value(f: LFunctionInstance, s: complex, cfg: EvalConfig) -> complex:
    M = min(_flat_satake_limit(f), cfg.max_direct_terms)
    val, bound = direct_series(f, s, cfg, terms=M)
    if bound > cfg.target_abs_error:
        raise EvalError(
            f"Satake table complete only to {M}; tail bound {bound:.3g} at Re(s) = {s.real} exceeds target {cfg.target_abs_error}"
        )
    return val


def _flat_satake_limit(f: LFunctionInstance) -> int:
    lim = math.inf
    for g in f.factors:
        if isinstance(g, SatakeSource):
            lim = min(lim, g.complete_to)
    return int(lim) if math.isfinite(lim) else (1 << 16)


def log_l(f: LFunctionInstance, s: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """log L(f, s): the branch continuous along the horizontal ray to Re = +infinity."""
    s = complex(s)
    anchor = complex(SIGMA_MAX, s.imag)
    if s.real >= SIGMA_MAX or not f.continuable:
        if s.real <= 1:
            raise DomainError(f"{f.name} has no continuation; Re(s) must exceed 1")
        M = _direct_length(f, s.real, cfg, with_log=False)
        if M is None:
            M = min(_flat_satake_limit(f), cfg.max_direct_terms)
        lam = lambda_table(f, M)
        logn = np.log(np.arange(2, M + 1))
        return complex(np.sum(lam[2:] / logn * np.exp(-s * logn)))
    base = log_l(f, anchor, cfg)
    k = max(64, int(math.ceil((SIGMA_MAX - s.real) * 200)))
    path = anchor + (s - anchor) * np.linspace(0, 1, k + 1)
    vals = l_values(f, path, cfg)
    if np.min(np.abs(vals)) < 10 * cfg.target_abs_error:
        raise SingularNeighborhood("L vanishes on the continuation path of log L")
    dphase = np.angle(vals[1:] / vals[:-1])
    if np.max(np.abs(dphase)) > math.pi / 4:
        raise EvalError("continuation path too coarse for log L")
    return complex(math.log(abs(vals[-1])), base.imag + float(dphase.sum()))


# -- derivatives -----------------------------------------------------------------


def _cauchy_derivative(f: LFunctionInstance, s: np.ndarray, cfg: EvalConfig):
    """(h(s), h'(s)) for h = (s - 1)^P L(f, s) by the trapezoid rule on circles.

    Vectorized over s; starts with 64 nodes and doubles (reusing nodes) until
    successive estimates agree.
    """
    s = np.atleast_1d(np.asarray(s, complex))
    r = np.full(s.shape, cfg.derivative_radius)
    r = np.minimum(r, np.maximum((s.real - SIGMA_MIN) / 2, 1e-6))
    r = np.minimum(r, np.maximum((SIGMA_MAX - s.real) / 2, 1e-6))
    h0 = regularized_values(f, s, cfg)
    K = 64
    w = np.exp(2j * np.pi * np.arange(K) / K)
    vals = regularized_values(f, (s[:, None] + r[:, None] * w[None, :]).ravel(), cfg).reshape(s.size, K)
    acc = (vals / w).sum(axis=1)
    prev = acc / (K * r)
    todo = np.arange(s.size)
    out = prev.copy()
    while K < 1024 and todo.size:
        w2 = np.exp(2j * np.pi * (np.arange(K) + 0.5) / K)
        pts = s[todo, None] + r[todo, None] * w2[None, :]
        vals2 = regularized_values(f, pts.ravel(), cfg).reshape(todo.size, K)
        acc[todo] = acc[todo] + (vals2 / w2).sum(axis=1)
        K *= 2
        cur = acc[todo] / (K * r[todo])
        out[todo] = cur
        done = np.abs(cur - prev[todo]) <= np.maximum(cfg.target_abs_error, 1e-13 * np.abs(cur))
        prev[todo] = cur
        todo = todo[~done]
    return h0, out


def _pole_count(f: LFunctionInstance) -> int:
    P = source_pole_count(f.coeff_source)
    return f.pole_order if P is None else P


def log_derivs(f: LFunctionInstance, s, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """L'/L(f, s) on an array of points.

    Where Re(s) is large enough the series -sum Lambda_f(n) n^-s is summed with
    an explicit tail bound; elsewhere the Cauchy-circle derivative is used.
    """
    s = np.atleast_1d(np.asarray(s, complex))
    P = _pole_count(f)
    if P and np.any(np.abs(s - 1) < 1e-12):
        raise PoleError(f"{f.name} has a pole at s = 1", P)
    out = np.empty(s.shape, complex)
    lengths = [(_direct_length(f, z.real, cfg, with_log=True) if z.real > 1 else None) for z in s]
    direct = np.array([M is not None for M in lengths], bool)
    for i in np.nonzero(direct)[0]:
        M = lengths[i]
        lam = lambda_table(f, M)
        logn = np.log(np.arange(2, M + 1))
        out[i] = -np.sum(lam[2:] * np.exp(-s[i] * logn))
    rest = np.nonzero(~direct)[0]
    if rest.size:
        if not f.continuable:
            raise DomainError(f"cannot evaluate L'/L for {f.name} at Re(s) = {s[rest[0]].real}")
        z = s[rest]
        h, dh = _cauchy_derivative(f, z, cfg)
        L_abs = np.abs(h) / np.abs(z - 1) ** P if P else np.abs(h)
        bad = L_abs <= 10 * cfg.target_abs_error
        if bad.any():
            raise SingularNeighborhood(
                f"L({f.name}, s) vanishes to working precision at s = {z[bad][0]}; shrink derivative_radius or move s"
            )
        out[rest] = dh / h - (P / (z - 1) if P else 0)
    return out


def log_deriv(f: LFunctionInstance, s: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """L'/L(f, s) at a single point."""
    return complex(log_derivs(f, np.array([complex(s)]), cfg)[0])


def l_and_newton_step(f: LFunctionInstance, s: complex, cfg: EvalConfig = DEFAULT_CONFIG):
    """(L(f, s), L/L'(f, s)) for Newton iteration near a zero."""
    s = complex(s)
    P = _pole_count(f)
    h, dh = _cauchy_derivative(f, np.array([s]), cfg)
    h, dh = complex(h[0]), complex(dh[0])
    denom = dh - (P * h / (s - 1) if P else 0)
    if denom == 0:
        raise SingularNeighborhood("L' vanishes; Newton step undefined")
    L = h / (s - 1) ** P if P else h
    return L, h / denom


# -- gamma factor (diagnostics only) ------------------------------------------------

_STIRLING = [
    1 / 12,
    -1 / 360,
    1 / 1260,
    -1 / 1680,
    1 / 1188,
    -691 / 360360,
    1 / 156,
    -3617 / 122400,
    43867 / 244188,
    -174611 / 125400,
]


def log_gamma(z: complex) -> complex:
    """log Gamma(z), principal branch, by Stirling with upward recursion to Re z >= 10."""
    z = complex(z)
    if z.real <= 0 and z.imag == 0 and z.real == int(z.real):
        raise PoleError("Gamma has a pole at non-positive integers")
    shift = 0j
    while z.real < 10:
        shift += cmath.log(z)
        z += 1
    inv = 1 / z
    inv2 = inv * inv
    ser = 0j
    p = inv
    for c in _STIRLING:
        ser += c * p
        p *= inv2
    lg = (z - 0.5) * cmath.log(z) - z + 0.5 * math.log(2 * math.pi) + ser
    return lg - shift


def gamma_factor(f: LFunctionInstance, s: complex) -> complex:
    """prod_j pi^(-(s + kappa_j)/2) Gamma((s + kappa_j)/2)."""
    tot = 0j
    for k in f.kappas:
        w = (s + k) / 2
        tot += -w * math.log(math.pi) + log_gamma(w)
    return cmath.exp(tot)


def completed_l(f: LFunctionInstance, s: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """q(f)^(s/2) gamma(f, s) L(f, s)."""
    return cmath.exp(s / 2 * math.log(f.conductor)) * gamma_factor(f, s) * l_value(f, s, cfg)


def shifted_conductor_log(f: LFunctionInstance, s: complex) -> float:
    return math.log(analytic_conductor_at(f, s))
