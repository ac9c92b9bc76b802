"""The de la Vallee Poussin inequality chain, evaluated numerically.

For a zero rho_0 = beta + i gamma the squared product

    L(g, sigma) = |L^3(f, sigma) L^4(f, sigma + i gamma) L(f, sigma + 2 i gamma)|^2

has log-coefficients Lambda_g(n) = |1 + n^(-i gamma)|^4 Lambda_f(n), whose real
parts are nonnegative whenever those of Lambda_f are.  Everything here is a
number computed from an instance: the kernel, the combination
-6 Re L'/L(sigma) - 8 Re L'/L(sigma + i gamma) - 2 Re L'/L(sigma + 2 i gamma),
the local explicit-formula residual, the two beta bounds and the real-zero
segment count.

The absolute constants A, B of the argument are not numerically known; they
are configurable and every bound is reported as a function of them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .eval_engine import DEFAULT_CONFIG, EvalConfig, log_derivs
from .lfunc_model import (
    ClassAxiomError,
    LFunctionInstance,
    analytic_conductor,
    analytic_conductor_at,
    lambda_coeff,
    validate_class_axioms,
)

__all__ = [
    "Branch",
    "DlvpReport",
    "ProofConstants",
    "SingularInput",
    "beta_bound",
    "dlvp_combination",
    "dlvp_grid",
    "exceptional_zero_capacity",
    "explicit_formula_residual",
    "explicit_formula_terms",
    "lambda_g",
    "region_boundary",
    "script_l",
    "trig_kernel",
]

DLVP_SLACK = 1e-6


class SingularInput(ValueError):
    pass


class Branch(str, enum.Enum):
    GENERIC_OR_LARGE_GAMMA = "GenericOrLargeGamma"
    POLE_SMALL_GAMMA = "PoleSmallGamma"
    REAL_ZERO_SEGMENT = "RealZeroSegment"


@dataclass(frozen=True)
class ProofConstants:
    A: float = 10.5
    B: float = 10.5
    c2: float = 0.05

    def __post_init__(self):
        if not self.A > 10:
            raise ValueError("A must exceed 10")
        if not self.B > 0:
            raise ValueError("B must be positive")
        if not self.c2 > 0:
            raise ValueError("c2 must be positive")

    @property
    def C(self) -> float:
        return max(self.A, self.B)

    @property
    def c(self) -> float:
        """The constant min{1/(400 C), c2} delivered by the argument."""
        return min(1 / (400 * self.C), self.c2)

    def to_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C, "c2": self.c2, "c": self.c}


def script_l(f: LFunctionInstance, gamma: float) -> float:
    """log(q(f) (|gamma| + 3)^d)."""
    return math.log(analytic_conductor(f)) + f.degree * math.log(abs(gamma) + 3)


def trig_kernel(theta):
    """3 + 4 cos(theta) + cos(2 theta), which equals 2 (1 + cos theta)^2."""
    return 3 + 4 * np.cos(theta) + np.cos(2 * theta)


def lambda_g(f: LFunctionInstance, n: int, gamma: float) -> complex:
    """|1 + n^(-i gamma)|^4 Lambda_f(n)."""
    return abs(1 + complex(np.exp(-1j * gamma * math.log(n)))) ** 4 * lambda_coeff(f, n)


def beta_bound(r: int, gamma: float, consts: ProofConstants, L: float) -> tuple[Branch, float]:
    """Branch taken and the resulting upper bound on beta.

    Generic branch (r = 0 or |gamma| > 1/(5 A L)): beta < 1 - 1/(400 A L).
    Pole branch (r = 1, 0 < |gamma| <= 1/(5 A L)): beta <= 1 - 1/(60 C L).
    """
    if gamma == 0:
        raise ValueError("gamma = 0 belongs to the real-zero segment analysis")
    if r == 0 or abs(gamma) > 1 / (5 * consts.A * L):
        return Branch.GENERIC_OR_LARGE_GAMMA, 1 - 1 / (400 * consts.A * L)
    return Branch.POLE_SMALL_GAMMA, 1 - 1 / (60 * consts.C * L)


def beta_satisfies(branch: Branch, beta: float, bound: float) -> bool:
    """Strict comparison on the generic branch, non-strict on the pole branch."""
    return beta < bound if branch is Branch.GENERIC_OR_LARGE_GAMMA else beta <= bound


def segment_start(f: LFunctionInstance, c2: float) -> float:
    return 1 - c2 / math.log(analytic_conductor(f))


def region_boundary(f: LFunctionInstance, c: float, t: float) -> float:
    """1 - c / log(q(f) (|t| + 3)^d)."""
    if not c > 0:
        raise ValueError("c must be positive")
    return 1 - c / (math.log(analytic_conductor(f)) + f.degree * math.log(abs(t) + 3))


@dataclass
class DlvpReport:
    sigma: float
    gamma: float
    re_ld_0: float
    re_ld_1: float
    re_ld_2: float
    combination: float
    nonnegative: bool
    branch: Branch
    beta_bound: float
    script_l: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["branch"] = self.branch.value
        return d


def _require_gate(f: LFunctionInstance):
    rep = validate_class_axioms(f, 1000)
    if not rep.nonnegative:
        raise ClassAxiomError(f"{f.name}: Re Lambda_f(n) < 0 at n = {rep.negative_at[:5]}; the inequality chain does not apply")


def _assemble(f, sigma, gamma, ld0, ld1, ld2, consts) -> DlvpReport:
    comb = -6 * ld0 - 8 * ld1 - 2 * ld2
    L = script_l(f, gamma)
    if gamma == 0:
        branch, bound = Branch.REAL_ZERO_SEGMENT, segment_start(f, consts.c2)
    else:
        branch, bound = beta_bound(f.pole_order, gamma, consts, L)
    return DlvpReport(
        sigma=float(sigma),
        gamma=float(gamma),
        re_ld_0=float(ld0),
        re_ld_1=float(ld1),
        re_ld_2=float(ld2),
        combination=float(comb),
        nonnegative=bool(comb >= -DLVP_SLACK),
        branch=branch,
        beta_bound=float(bound),
        script_l=float(L),
    )


def dlvp_combination(
    f: LFunctionInstance,
    sigma: float,
    gamma: float,
    cfg: EvalConfig = DEFAULT_CONFIG,
    consts: ProofConstants = ProofConstants(),
    check_gate: bool = True,
) -> DlvpReport:
    if not 1 < sigma <= 1.25:
        raise ValueError("sigma must lie in (1, 1.25]")
    if check_gate:
        _require_gate(f)
    pts = np.array([sigma, sigma + 1j * gamma, sigma + 2j * gamma])
    ld = log_derivs(f, pts, cfg).real
    return _assemble(f, sigma, gamma, ld[0], ld[1], ld[2], consts)


def dlvp_grid(
    f: LFunctionInstance,
    sigmas,
    gammas,
    cfg: EvalConfig = DEFAULT_CONFIG,
    consts: ProofConstants = ProofConstants(),
) -> list[DlvpReport]:
    """dlvp_combination over a grid, sharing log-derivative evaluations."""
    _require_gate(f)
    sigmas = [float(x) for x in sigmas]
    gammas = [float(x) for x in gammas]
    for sg in sigmas:
        if not 1 < sg <= 1.25:
            raise ValueError("sigma must lie in (1, 1.25]")
    out = []
    for sg in sigmas:
        heights = sorted({round(k * g, 12) for g in gammas for k in (0, 1, 2)})
        vals = log_derivs(f, sg + 1j * np.array(heights), cfg).real
        table = dict(zip(heights, vals))
        for g in gammas:
            out.append(_assemble(f, sg, g, table[0.0], table[round(g, 12)], table[round(2 * g, 12)], consts))
    return out


# -- explicit formula --------------------------------------------------------------


@dataclass
class ExplicitTerms:
    s: complex
    log_deriv: complex
    pole_terms: complex
    kappa_terms: list[complex] = field(default_factory=list)
    zero_terms: list[complex] = field(default_factory=list)

    @property
    def residual(self) -> complex:
        return self.log_deriv + self.pole_terms - sum(self.kappa_terms) - sum(self.zero_terms)

    @property
    def positive(self) -> bool:
        return all(t.real > 0 for t in self.kappa_terms + self.zero_terms)


def explicit_formula_terms(
    f: LFunctionInstance, s: complex, zeros, cfg: EvalConfig = DEFAULT_CONFIG
) -> ExplicitTerms:
    """Pieces of L'/L(s) + r/s + r/(s-1) = sum 1/(s+kappa_j) + sum 1/(s-rho) + O(log q(f, s)).

    Only kappa_j with |s + kappa_j| <= 1 and zeros with |s - rho| <= 1 enter.
    """
    s = complex(s)
    if not 1 <= s.real <= 1.25:
        raise ValueError("Re(s) must lie in [1, 5/4]")
    if abs(s - 1) < 1e-3:
        raise SingularInput(f"s = {s} is within 1e-3 of the pole at 1")
    zeros = [complex(z) for z in zeros]
    for z in zeros:
        if abs(s - z) < 1e-3:
            raise SingularInput(f"s = {s} is within 1e-3 of the zero {z}")
    r = f.pole_order
    ld = complex(log_derivs(f, np.array([s]), cfg)[0])
    return ExplicitTerms(
        s=s,
        log_deriv=ld,
        pole_terms=r / s + r / (s - 1),
        kappa_terms=[1 / (s + k) for k in f.kappas if abs(s + k) <= 1],
        zero_terms=[1 / (s - z) for z in zeros if abs(s - z) <= 1],
    )


def explicit_formula_residual(
    f: LFunctionInstance, s: complex, zeros, cfg: EvalConfig = DEFAULT_CONFIG
) -> float:
    """|residual| / log q(f, s): the size of the implied constant at s."""
    terms = explicit_formula_terms(f, s, zeros, cfg)
    return abs(terms.residual) / math.log(analytic_conductor_at(f, s))


def exceptional_zero_capacity(f: LFunctionInstance, c2: float, real_zeros) -> int:
    """Number of supplied real zeros in [1 - c2/log q(f), 1)."""
    lo = segment_start(f, c2)
    return sum(1 for b in real_zeros if lo <= b < 1)
