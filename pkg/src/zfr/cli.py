"""Command-line entry point.

Exit codes: 0 certified / passed, 1 usage or I/O error, 2 zero found or
validation failure, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dlvp_certifier import ProofConstants, dlvp_grid, explicit_formula_terms, region_boundary
from .eval_engine import EvalConfig, EvalError
from .instance_io import InstanceParseError, parse_instance
from .lfunc_model import ClassAxiomError, analytic_conductor, analytic_conductor_at, validate_class_axioms
from .report import render_region_figure, write_boundary_csv, write_json
from .zero_scanner import (
    Verdict,
    ZeroCache,
    beta_bound_consistency,
    certify_region,
    strip_zeros,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3
COMMANDS = ("validate", "conductor", "dlvp-check", "scan", "certify", "residual", "report")
_VERDICT_EXIT = {Verdict.CERTIFIED: EXIT_OK, Verdict.ZERO_FOUND: EXIT_FAIL, Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}


@dataclass
class RunConfig:
    instance_path: Path
    command: str
    c: float | None = None
    T: float | None = None
    A: float = 10.5
    B: float = 10.5
    c2: float = 0.05
    target_abs_error: float = 1e-10
    em_order: int = 8
    output_dir: Path = Path("out")
    threads: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def eval_config(self) -> EvalConfig:
        return EvalConfig(em_order=self.em_order, target_abs_error=self.target_abs_error)

    @property
    def constants(self) -> ProofConstants:
        return ProofConstants(A=self.A, B=self.B, c2=self.c2)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", required=True, type=Path, help="instance JSON file")
    common.add_argument("--c", type=float, default=None, help="region constant (demo default 0.05)")
    common.add_argument("--T", type=float, default=None, help="height of the scanned region")
    common.add_argument("--A", type=float, default=10.5)
    common.add_argument("--B", type=float, default=10.5)
    common.add_argument("--c2", type=float, default=0.05)
    common.add_argument("--abs-error", type=float, default=1e-10, dest="abs_error")
    common.add_argument("--em-order", type=int, default=8, dest="em_order")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", type=Path, default=Path("out"))

    ap = argparse.ArgumentParser(prog="zfr", description="Zero-free regions for L-functions.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", parents=[common], help="check the class axioms")
    p.add_argument("--N", type=int, default=1000)
    sub.add_parser("conductor", parents=[common], help="analytic conductor and boundary table")
    p = sub.add_parser("dlvp-check", parents=[common], help="3-4-1 inequality on a (sigma, gamma) grid")
    p.add_argument("--gamma-step", type=float, default=0.1, dest="gamma_step")
    sub.add_parser("scan", parents=[common], help="locate zeros in the critical strip")
    sub.add_parser("certify", parents=[common], help="certify the zero-free region")
    p = sub.add_parser("residual", parents=[common], help="explicit-formula residuals")
    p.add_argument("--points", type=int, default=100)
    sub.add_parser("report", parents=[common], help="certification plus plot data and figure")
    return ap


def _run_config(ns: argparse.Namespace) -> RunConfig:
    extra = {k: getattr(ns, k) for k in ("N", "gamma_step", "points") if hasattr(ns, k)}
    return RunConfig(
        instance_path=ns.instance,
        command=ns.command,
        c=ns.c,
        T=ns.T,
        A=ns.A,
        B=ns.B,
        c2=ns.c2,
        target_abs_error=ns.abs_error,
        em_order=ns.em_order,
        output_dir=ns.out,
        threads=ns.threads,
        extra=extra,
    )


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def _cache(rc: RunConfig) -> ZeroCache:
    return ZeroCache()


def _cmd_validate(f, rc: RunConfig) -> int:
    rep = validate_class_axioms(f, rc.extra.get("N", 1000))
    out = write_json(rc.output_dir / f"validate_{_slug(f.name)}.json", rep)
    print(f"{f.name}: bound_ok={rep.bound_ok} nonnegative={rep.nonnegative} kappa_ok={rep.kappa_ok} -> {out}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_conductor(f, rc: RunConfig) -> int:
    c = rc.c if rc.c is not None else 0.05
    T = rc.T if rc.T is not None else 30.0
    print(f"{analytic_conductor(f):.12g}")
    print("t,boundary_sigma")
    for t in [x for x in (0, 1, 2, 5, 10, 20, 30, 40, 50, 60) if x <= T]:
        print(f"{t},{region_boundary(f, c, t):.12g}")
    return EXIT_OK


def _cmd_dlvp(f, rc: RunConfig) -> int:
    T = rc.T if rc.T is not None else 30.0
    step = rc.extra.get("gamma_step", 0.1)
    gammas = np.round(np.arange(0, T + step / 2, step), 12)
    reps = dlvp_grid(f, (1.01, 1.05, 1.1, 1.2), gammas, rc.eval_config, rc.constants)
    worst = min(reps, key=lambda r: r.combination)
    ok = all(r.nonnegative for r in reps)
    doc = {"instance": f.name, "constants": rc.constants, "all_nonnegative": ok, "min_combination": worst.combination, "reports": reps}
    out = write_json(rc.output_dir / f"dlvp_{_slug(f.name)}.json", doc)
    print(f"{f.name}: {len(reps)} points, min combination {worst.combination:.6g} at sigma={worst.sigma}, gamma={worst.gamma} -> {out}")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_scan(f, rc: RunConfig) -> int:
    T = rc.T if rc.T is not None else 30.0
    zeros = strip_zeros(f, T, rc.eval_config)
    _cache(rc).append(f.name, zeros)
    out = write_json(rc.output_dir / f"zeros_{_slug(f.name)}.json", {"instance": f.name, "T": T, "zeros": zeros})
    print(f"{f.name}: {len(zeros)} zeros with |t| <= {T} -> {out}")
    return EXIT_OK


def _certify(f, rc: RunConfig):
    return certify_region(f, rc.c, rc.T, rc.eval_config, rc.constants, threads=rc.threads)


def _cmd_certify(f, rc: RunConfig) -> int:
    rep = _certify(f, rc)
    out = write_json(rc.output_dir / f"certification_{_slug(f.name)}.json", rep)
    print(f"{f.name}: {rep.verdict.value} (c used {rep.c_used:g}, proof c {rep.c_proof:.3g}, T {rep.T:g}) -> {out}")
    return _VERDICT_EXIT[rep.verdict]


def _zeros_for(f, T: float, rc: RunConfig):
    cache = _cache(rc)
    cached = cache.load(f.name)
    if cached and max(abs(z.gamma) for z in cached) >= T:
        return cached
    zeros = strip_zeros(f, T, rc.eval_config)
    cache.append(f.name, zeros)
    return zeros


def _cmd_residual(f, rc: RunConfig) -> int:
    T = rc.T if rc.T is not None else 30.0
    n = rc.extra.get("points", 100)
    zeros = [z.rho for z in _zeros_for(f, T + 1, rc)]
    rng = np.random.default_rng(0)
    rows = []
    ok = True
    while len(rows) < n:
        s = complex(rng.uniform(1, 1.25), rng.uniform(-T, T))
        if abs(s - 1) < 1e-2:
            continue
        terms = explicit_formula_terms(f, s, zeros, rc.eval_config)
        ratio = abs(terms.residual) / math.log(analytic_conductor_at(f, s))
        ok &= terms.positive and math.isfinite(ratio)
        rows.append({"s": s, "ratio": ratio, "positive": terms.positive, "zeros_in_window": len(terms.zero_terms)})
    doc = {"instance": f.name, "max_ratio": max(r["ratio"] for r in rows), "points": rows}
    out = write_json(rc.output_dir / f"residual_{_slug(f.name)}.json", doc)
    print(f"{f.name}: max |residual|/log q(f,s) = {doc['max_ratio']:.4g} over {n} points -> {out}")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_report(f, rc: RunConfig) -> int:
    rep = _certify(f, rc)
    zeros = _zeros_for(f, rc.T, rc)
    zeros = [z for z in zeros if abs(z.gamma) <= rc.T]
    slug = _slug(f.name)
    d = rc.output_dir
    write_json(d / f"certification_{slug}.json", rep)
    write_json(
        d / f"report_{slug}.json",
        {"certification": rep, "zeros": zeros, "beta_bounds": beta_bound_consistency(f, zeros, rc.constants)},
    )
    csv_path = write_boundary_csv(d / f"boundary_{slug}.csv", f, rc.c, rc.T, zeros)
    fig_path = render_region_figure(d / f"region_{slug}.png", f, rc.c, rc.T, zeros, rep.boxes)
    print(f"{f.name}: {rep.verdict.value}; wrote {csv_path} and {fig_path}")
    return _VERDICT_EXIT[rep.verdict]


_DISPATCH = {
    "validate": _cmd_validate,
    "conductor": _cmd_conductor,
    "dlvp-check": _cmd_dlvp,
    "scan": _cmd_scan,
    "certify": _cmd_certify,
    "residual": _cmd_residual,
    "report": _cmd_report,
}


def run(argv=None) -> int:
    ap = _parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    rc = _run_config(ns)
    if rc.command in ("certify", "report") and (rc.c is None or rc.T is None):
        print(f"zfr {rc.command}: --c and --T are required", file=sys.stderr)
        return EXIT_USAGE
    try:
        rc.eval_config, rc.constants
    except ValueError as exc:
        print(f"zfr: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        f = parse_instance(rc.instance_path)
    except InstanceParseError as exc:
        print(f"zfr: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"zfr: cannot read {rc.instance_path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _DISPATCH[rc.command](f, rc)
    except ClassAxiomError as exc:
        print(f"zfr: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except EvalError as exc:
        print(f"zfr: evaluation failed: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except OSError as exc:
        print(f"zfr: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
