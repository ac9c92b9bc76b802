"""Argument-principle zero counting, zero location and region certification."""

from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dlvp_certifier import (
    Branch,
    ProofConstants,
    beta_bound,
    beta_satisfies,
    exceptional_zero_capacity,
    region_boundary,
    script_l,
    segment_start,
)
from .eval_engine import DEFAULT_CONFIG, EvalConfig, EvalError, l_and_newton_step, l_values
from .lfunc_model import (
    ClassAxiomError,
    LFunctionInstance,
    analytic_conductor,
    has_real_coefficients,
    validate_class_axioms,
)

__all__ = [
    "BoundaryZero",
    "CertificationReport",
    "ComplexRectangle",
    "Inconclusive",
    "Method",
    "RefinementError",
    "Verdict",
    "ZeroCache",
    "ZeroRecord",
    "beta_bound_consistency",
    "certify_region",
    "count_zeros",
    "find_zeros",
    "real_segment_scan",
    "refine_zero",
    "strip_zeros",
    "zeros_in",
]

BOUNDARY_THRESHOLD = 1e-8
PERTURBATION = 1e-4
MAX_RETRIES = 5
MAX_PHASE_STEP = math.pi / 2
MAX_NODES = 1 << 17
INITIAL_SPACING = 0.05
SIGMA_RIGHT = 2.0
REGION_MARGIN = 1e-3


class Inconclusive(EvalError):
    pass


class BoundaryZero(Inconclusive):
    pass


class RefinementError(EvalError):
    def __init__(self, msg: str, record: ZeroRecord | None = None):
        super().__init__(msg)
        self.record = record


class Method(str, enum.Enum):
    ARGUMENT_PRINCIPLE = "ArgumentPrinciple"
    NEWTON_REFINED = "NewtonRefined"


@dataclass(frozen=True)
class ComplexRectangle:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        if not self.sigma_min < self.sigma_max:
            raise ValueError("sigma_min must be below sigma_max")
        if not self.t_min < self.t_max:
            raise ValueError("t_min must be below t_max")

    @property
    def width(self) -> float:
        return self.sigma_max - self.sigma_min

    @property
    def height(self) -> float:
        return self.t_max - self.t_min

    @property
    def center(self) -> complex:
        return complex((self.sigma_min + self.sigma_max) / 2, (self.t_min + self.t_max) / 2)

    def contains(self, s: complex) -> bool:
        return self.sigma_min < s.real < self.sigma_max and self.t_min < s.imag < self.t_max

    def boundary_distance(self, s: complex) -> float:
        """Distance from s to the boundary curve."""
        x, y = s.real, s.imag
        dx = max(self.sigma_min - x, 0, x - self.sigma_max)
        dy = max(self.t_min - y, 0, y - self.t_max)
        if dx or dy:
            return math.hypot(dx, dy)
        return min(x - self.sigma_min, self.sigma_max - x, y - self.t_min, self.t_max - y)

    def grown(self, delta: float) -> ComplexRectangle:
        return ComplexRectangle(self.sigma_min - delta, self.sigma_max + delta, self.t_min - delta, self.t_max + delta)

    def corners(self) -> list[complex]:
        return [
            complex(self.sigma_min, self.t_min),
            complex(self.sigma_max, self.t_min),
            complex(self.sigma_max, self.t_max),
            complex(self.sigma_min, self.t_max),
        ]

    def to_dict(self) -> dict:
        return {"sigma_min": self.sigma_min, "sigma_max": self.sigma_max, "t_min": self.t_min, "t_max": self.t_max}


@dataclass(frozen=True)
class ZeroRecord:
    rho: complex
    multiplicity: int
    refine_error: float
    method: Method

    @property
    def beta(self) -> float:
        return self.rho.real

    @property
    def gamma(self) -> float:
        return self.rho.imag

    def conjugate(self) -> ZeroRecord:
        return ZeroRecord(self.rho.conjugate(), self.multiplicity, self.refine_error, self.method)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "gamma": self.gamma,
            "multiplicity": self.multiplicity,
            "refine_error": self.refine_error,
            "method": self.method.value,
        }


# -- winding number ---------------------------------------------------------------


def _contour_points(rect: ComplexRectangle, tau: np.ndarray) -> np.ndarray:
    """Map tau in [0, 4) to the boundary, edge by edge counter-clockwise."""
    c = rect.corners()
    edge = np.minimum(tau.astype(int), 3)
    u = tau - edge
    start = np.array(c)[edge]
    end = np.array(c[1:] + c[:1])[edge]
    return start + u * (end - start)


def _winding(f: LFunctionInstance, rect: ComplexRectangle, cfg: EvalConfig) -> int:
    """Winding number of L(f, .) around the rectangle, without perturbation."""
    if f.pole_order and rect.boundary_distance(1 + 0j) < 1e-3:
        raise ValueError("rectangle boundary passes within 1e-3 of the pole at s = 1")
    lens = [rect.width, rect.height, rect.width, rect.height]
    taus = [e + np.arange(max(8, math.ceil(ln / INITIAL_SPACING))) / max(8, math.ceil(ln / INITIAL_SPACING)) for e, ln in enumerate(lens)]
    tau = np.concatenate(taus)
    vals = l_values(f, _contour_points(rect, tau), cfg)
    while True:
        if np.min(np.abs(vals)) < BOUNDARY_THRESHOLD:
            raise BoundaryZero(f"|L| < {BOUNDARY_THRESHOLD} on the boundary of {rect}")
        nxt = np.roll(vals, -1)
        dphi = np.angle(nxt / vals)
        jump = np.abs(nxt - vals) > 0.5 * (np.abs(nxt) + np.abs(vals))
        bad = np.nonzero((np.abs(dphi) >= MAX_PHASE_STEP) | jump)[0]
        if not bad.size:
            w = dphi.sum() / (2 * math.pi)
            k = int(round(w))
            if abs(w - k) > 1e-6:
                raise Inconclusive(f"non-integral winding {w} on {rect}")
            return k
        if tau.size + bad.size > MAX_NODES:
            raise Inconclusive(f"argument tracking exceeded {MAX_NODES} nodes on {rect}")
        t_next = np.append(tau[1:], 4.0)
        mids = (tau[bad] + t_next[bad]) / 2
        mvals = l_values(f, _contour_points(rect, mids), cfg)
        tau = np.insert(tau, bad + 1, mids)
        vals = np.insert(vals, bad + 1, mvals)


def _perturbations():
    for k in range(1, MAX_RETRIES + 1):
        yield (1 if k % 2 else -1) * ((k + 1) // 2) * PERTURBATION


def count_zeros(f: LFunctionInstance, rect: ComplexRectangle, cfg: EvalConfig = DEFAULT_CONFIG) -> int:
    """Zeros minus poles of L(f, .) inside rect, by the argument principle.

    A boundary zero triggers up to five deterministic 1e-4 perturbations of
    all four sides (+1, -1, +2, -2, +3 times 1e-4).
    """
    return _count_with_rect(f, rect, cfg)[0]


def _count_with_rect(f, rect, cfg):
    try:
        return _winding(f, rect, cfg), rect
    except BoundaryZero:
        pass
    for delta in _perturbations():
        r2 = rect.grown(delta)
        try:
            return _winding(f, r2, cfg), r2
        except BoundaryZero:
            continue
    raise Inconclusive(f"zero on the boundary of {rect} persists after {MAX_RETRIES} perturbations")


def _pole_inside(f: LFunctionInstance, rect: ComplexRectangle) -> int:
    return f.pole_order if rect.contains(1 + 0j) else 0


def zeros_in(f: LFunctionInstance, rect: ComplexRectangle, cfg: EvalConfig = DEFAULT_CONFIG) -> int:
    """Number of zeros (with multiplicity) inside rect."""
    w, used = _count_with_rect(f, rect, cfg)
    return w + _pole_inside(f, used)


# -- refinement and search -----------------------------------------------------------


def refine_zero(
    f: LFunctionInstance,
    seed: complex,
    cfg: EvalConfig = DEFAULT_CONFIG,
    box: ComplexRectangle | None = None,
    verified: bool = False,
) -> ZeroRecord:
    """Newton iteration s <- s - L/L' started at seed, confined to a box holding one zero.

    The default box has side 0.1 and is centred at seed.
    """
    seed = complex(seed)
    if box is None:
        box = ComplexRectangle(seed.real - 0.05, seed.real + 0.05, seed.imag - 0.05, seed.imag + 0.05)
    coarse = ZeroRecord(box.center, 1, math.hypot(box.width, box.height) / 2, Method.ARGUMENT_PRINCIPLE)
    if not verified:
        n = zeros_in(f, box, cfg)
        if n != 1:
            raise RefinementError(f"box around {seed} holds {n} zeros, expected 1")
    s = seed
    step = math.inf
    for _ in range(50):
        try:
            _, dz = l_and_newton_step(f, s, cfg)
        except EvalError as exc:
            raise RefinementError(f"Newton step failed at {s}: {exc}", coarse) from exc
        s = s - dz
        step = abs(dz)
        if not (box.sigma_min <= s.real <= box.sigma_max and box.t_min <= s.imag <= box.t_max):
            raise RefinementError(f"Newton iterate {s} escaped the box {box}", coarse)
        if step < 1e-10:
            break
    else:
        raise RefinementError(f"Newton did not converge from {seed} (last step {step:.3g})", coarse)
    return ZeroRecord(s, 1, step, Method.NEWTON_REFINED if step <= 1e-6 else Method.ARGUMENT_PRINCIPLE)


def _split(box: ComplexRectangle, frac: float) -> tuple[ComplexRectangle, ComplexRectangle]:
    if box.width >= box.height:
        m = box.sigma_min + frac * box.width
        return (
            ComplexRectangle(box.sigma_min, m, box.t_min, box.t_max),
            ComplexRectangle(m, box.sigma_max, box.t_min, box.t_max),
        )
    m = box.t_min + frac * box.height
    return (
        ComplexRectangle(box.sigma_min, box.sigma_max, box.t_min, m),
        ComplexRectangle(box.sigma_min, box.sigma_max, m, box.t_max),
    )


def _exact_zeros(f, box, cfg) -> int:
    return _winding(f, box, cfg) + _pole_inside(f, box)


def _search(f, box: ComplexRectangle, n: int, cfg: EvalConfig, leaf: float) -> list[ZeroRecord]:
    if n == 0:
        return []
    if n == 1 and max(box.width, box.height) <= leaf:
        try:
            return [refine_zero(f, box.center, cfg, box=box, verified=True)]
        except RefinementError as exc:
            if max(box.width, box.height) < 1e-6:
                return [exc.record]
    if max(box.width, box.height) < 1e-6:
        return [ZeroRecord(box.center, n, math.hypot(box.width, box.height) / 2, Method.ARGUMENT_PRINCIPLE)]
    for frac in (0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65):
        a, b = _split(box, frac)
        try:
            na, nb = _exact_zeros(f, a, cfg), _exact_zeros(f, b, cfg)
        except BoundaryZero:
            continue
        if na + nb != n:
            raise Inconclusive(f"split counts {na} + {nb} disagree with {n} on {box}")
        return _search(f, a, na, cfg, leaf) + _search(f, b, nb, cfg, leaf)
    raise Inconclusive(f"every split of {box} meets a zero")


def find_zeros(
    f: LFunctionInstance, rect: ComplexRectangle, cfg: EvalConfig = DEFAULT_CONFIG, leaf: float = 0.1
) -> list[ZeroRecord]:
    """All zeros in rect: tile into unit-height boxes, bisect, refine by Newton."""
    edges = list(np.arange(rect.t_min, rect.t_max, 1.0)) + [rect.t_max]
    if edges[-1] - edges[-2] < 1e-9:
        edges.pop(-2)
    out: list[ZeroRecord] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        box = ComplexRectangle(rect.sigma_min, rect.sigma_max, float(lo), float(hi))
        w, used = _count_with_rect(f, box, cfg)
        out += _search(f, used, w + _pole_inside(f, used), cfg, leaf)
    return sorted(out, key=lambda z: (z.gamma, z.beta))


def strip_zeros(
    f: LFunctionInstance,
    T: float,
    cfg: EvalConfig = DEFAULT_CONFIG,
    sigma_min: float = 0.02,
    sigma_max: float = 0.98,
) -> list[ZeroRecord]:
    """Zeros in sigma_min < sigma < sigma_max, |t| <= T.

    Real-coefficient instances scan t >= -1/2 and mirror the rest.
    """
    if has_real_coefficients(f):
        found = find_zeros(f, ComplexRectangle(sigma_min, sigma_max, -0.5, T), cfg)
        mirrored = [z.conjugate() for z in found if z.gamma > 0.5]
        out = found + mirrored
    else:
        out = find_zeros(f, ComplexRectangle(sigma_min, sigma_max, -T, T), cfg)
    return sorted(out, key=lambda z: (z.gamma, z.beta))


# -- real segment -------------------------------------------------------------------


def _bisect(f, lo: float, hi: float, flo: float, cfg: EvalConfig) -> float:
    while hi - lo > 1e-10:
        mid = (lo + hi) / 2
        fm = float(l_values(f, np.array([mid + 0j]), cfg)[0].real)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def real_segment_scan(f: LFunctionInstance, cfg: EvalConfig = DEFAULT_CONFIG, step: float = 1e-4) -> list[float]:
    """Real zeros of L(f, sigma) in [3/4, 1), sorted."""
    if has_real_coefficients(f):
        grid = 0.75 + step * np.arange(int(round(0.25 / step)))
        vals = l_values(f, grid + 0j, cfg).real
        out = []
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]:
            if vals[i] == 0:
                out.append(float(grid[i]))
            elif vals[i + 1] != 0:
                out.append(_bisect(f, float(grid[i]), float(grid[i + 1]), float(vals[i]), cfg))
        return sorted(set(out))
    # no sign structure: tiny boxes along the segment
    out = []
    a = 0.75
    while a < 0.999 - 1e-12:
        b = min(a + 0.01, 0.999)
        box = ComplexRectangle(a, b, -0.005, 0.005)
        for z in _search(f, box, zeros_in(f, box, cfg), cfg, leaf=0.01):
            if abs(z.gamma) < 1e-8:
                out.append(z.beta)
        a = b
    return sorted(out)


# -- certification --------------------------------------------------------------------


class Verdict(str, enum.Enum):
    CERTIFIED = "Certified"
    ZERO_FOUND = "ZeroFound"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class BoxResult:
    rect: ComplexRectangle
    winding: int | None
    zeros: int | None
    nonreal_zeros: int | None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "rect": self.rect.to_dict(),
            "winding": self.winding,
            "zeros": self.zeros,
            "nonreal_zeros": self.nonreal_zeros,
            "error": self.error,
        }


@dataclass
class CertificationReport:
    instance: str
    c_used: float
    c_proof: float
    T: float
    analytic_conductor: float
    degree: int
    constants: ProofConstants
    symmetric: bool
    boxes: list[BoxResult]
    verdict: Verdict
    zero: ZeroRecord | None
    exceptional: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "c_used": self.c_used,
            "c_proof": self.c_proof,
            "T": self.T,
            "analytic_conductor": self.analytic_conductor,
            "degree": self.degree,
            "constants": self.constants.to_dict(),
            "symmetric": self.symmetric,
            "boxes": [b.to_dict() for b in self.boxes],
            "verdict": self.verdict.value,
            "zero": self.zero.to_dict() if self.zero else None,
            "exceptional": self.exceptional,
        }


def certification_boxes(f: LFunctionInstance, c: float, T: float, symmetric: bool) -> list[ComplexRectangle]:
    """Unit-height boxes covering sigma >= boundary - 1e-3, |t| <= T (t >= 0 if symmetric).

    The boundary rises with |t|, so each box starts at the boundary value for
    its smallest |t|; the first box straddles the real axis.
    """
    tops = list(np.arange(0.5, T, 1.0)) + [T] if T > 0.5 else [T]
    tops = [float(x) for x in tops]
    if len(tops) > 1 and tops[-1] - tops[-2] < 1e-9:
        tops.pop(-2)
    boxes = [ComplexRectangle(region_boundary(f, c, 0.0) - REGION_MARGIN, SIGMA_RIGHT, -tops[0], tops[0])]
    for lo, hi in zip(tops[:-1], tops[1:]):
        sig = region_boundary(f, c, lo) - REGION_MARGIN
        boxes.append(ComplexRectangle(sig, SIGMA_RIGHT, lo, hi))
        if not symmetric:
            boxes.append(ComplexRectangle(sig, SIGMA_RIGHT, -hi, -lo))
    return boxes


def _count_box(f, rect, cfg) -> tuple[int | None, int | None, str | None]:
    try:
        w, used = _count_with_rect(f, rect, cfg)
        return w, w + _pole_inside(f, used), None
    except Inconclusive as exc:
        return None, None, str(exc)


def certify_region(
    f: LFunctionInstance,
    c: float,
    T: float,
    cfg: EvalConfig = DEFAULT_CONFIG,
    consts: ProofConstants = ProofConstants(),
    threads: int = 1,
) -> CertificationReport:
    """Check numerically that L(f, s) has no zeros with sigma > 1 - c/log(q(f)(|t|+3)^d), |t| <= T,

    apart from at most one simple real zero."""
    if not c > 0:
        raise ValueError("c must be positive")
    if not 0 < T <= 60:
        raise ValueError("T must lie in (0, 60]")
    rep = validate_class_axioms(f, 1000)
    if not rep.passed:
        raise ClassAxiomError(
            f"{f.name} fails the class axioms (nonnegative={rep.nonnegative}, bound_ok={rep.bound_ok}, kappa_ok={rep.kappa_ok})"
        )
    if not rep.conductor_ok:
        raise ClassAxiomError(f"{f.name}: degree {f.degree} is not below log q(f) = {math.log(analytic_conductor(f)):.4f}")
    if not f.continuable:
        raise ClassAxiomError(f"{f.name} has no analytic continuation available for scanning")
    symmetric = has_real_coefficients(f)
    rects = certification_boxes(f, c, T, symmetric)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda r: _count_box(f, r, cfg), rects))
    else:
        counts = [_count_box(f, r, cfg) for r in rects]

    real_zeros = real_segment_scan(f, cfg)
    capacity = exceptional_zero_capacity(f, consts.c2, real_zeros)
    central = rects[0]
    in_region = [b for b in real_zeros if b > central.sigma_min]
    boxes = []
    for i, (rect, (w, n, err)) in enumerate(zip(rects, counts)):
        nonreal = None if n is None else n - (len(in_region) if i == 0 else 0)
        boxes.append(BoxResult(rect, w, n, nonreal, err))

    zero = None
    if any(b.error for b in boxes):
        verdict = Verdict.INCONCLUSIVE
    elif any(b.nonreal_zeros for b in boxes):
        verdict = Verdict.ZERO_FOUND
        bad = next(b for b in boxes if b.nonreal_zeros)
        try:
            found = [z for z in find_zeros(f, bad.rect, cfg) if abs(z.gamma) > 1e-8 or z.multiplicity > 1]
            zero = found[0] if found else None
        except EvalError:
            zero = ZeroRecord(bad.rect.center, bad.nonreal_zeros, max(bad.rect.width, bad.rect.height), Method.ARGUMENT_PRINCIPLE)
    elif capacity > 1 or len(in_region) > 1:
        verdict = Verdict.ZERO_FOUND
        zero = ZeroRecord(complex(sorted(in_region or real_zeros)[-2], 0), 1, 1e-10, Method.ARGUMENT_PRINCIPLE)
    else:
        verdict = Verdict.CERTIFIED

    exceptional = {
        "real_zeros": real_zeros,
        "segment_start": segment_start(f, consts.c2),
        "capacity_count": capacity,
        "in_region": in_region,
        "ok": capacity <= 1 and len(in_region) <= 1,
    }
    return CertificationReport(
        instance=f.name,
        c_used=float(c),
        c_proof=consts.c,
        T=float(T),
        analytic_conductor=analytic_conductor(f),
        degree=f.degree,
        constants=consts,
        symmetric=symmetric,
        boxes=boxes,
        verdict=verdict,
        zero=zero,
        exceptional=exceptional,
    )


def beta_bound_consistency(f: LFunctionInstance, zeros, consts: ProofConstants = ProofConstants()) -> list[dict]:
    """Compare each nonreal zero with its beta bound; violations indicate misconfigured constants."""
    rows = []
    for z in zeros:
        if z.gamma == 0:
            continue
        L = script_l(f, z.gamma)
        branch, bound = beta_bound(f.pole_order, z.gamma, consts, L)
        rows.append(
            {
                "beta": z.beta,
                "gamma": z.gamma,
                "branch": branch.value,
                "bound": bound,
                "ok": beta_satisfies(branch, z.beta, bound),
            }
        )
    return rows


# -- zero cache ------------------------------------------------------------------------


class ZeroCache:
    """Append-only JSON-lines store of located zeros."""

    def __init__(self, path: Path | str | None = None):
        if path is None:
            path = Path(os.environ.get("ZFR_CACHE_DIR", ".zfr_cache")) / "zeros.jsonl"
        self.path = Path(path)

    def append(self, instance: str, zeros) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            for z in zeros:
                rec = {
                    "instance": instance,
                    "beta": z.beta,
                    "gamma": z.gamma,
                    "multiplicity": z.multiplicity,
                    "refine_error": z.refine_error,
                }
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    def load(self, instance: str) -> list[ZeroRecord]:
        if not self.path.exists():
            return []
        seen = {}
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec["instance"] != instance:
                continue
            key = (round(rec["beta"], 8), round(rec["gamma"], 8))
            seen[key] = ZeroRecord(
                complex(rec["beta"], rec["gamma"]),
                int(rec["multiplicity"]),
                float(rec["refine_error"]),
                Method.NEWTON_REFINED if rec["refine_error"] <= 1e-6 else Method.ARGUMENT_PRINCIPLE,
            )
        return sorted(seen.values(), key=lambda z: (z.gamma, z.beta))
