"""Deterministic report serialization, plot data and figures."""

from __future__ import annotations

import csv
import enum
import json
import math
from pathlib import Path

import numpy as np

from .dlvp_certifier import region_boundary

__all__ = ["boundary_rows", "canonical", "dumps", "render_region_figure", "write_boundary_csv", "write_json"]

SIG_DIGITS = 12


def _round(x: float) -> float | str:
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.{SIG_DIGITS}g}")


def canonical(obj):
    """Plain JSON data with floats rounded to 12 significant digits."""
    if hasattr(obj, "to_dict"):
        return canonical(obj.to_dict())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_round(obj.real), _round(obj.imag)]
    return obj


def dumps(obj) -> str:
    return json.dumps(canonical(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def boundary_rows(f, c: float, T: float, zeros, step: float = 0.5) -> list[tuple[float, float, float | None]]:
    """(t, boundary sigma, beta of the zero whose ordinate is nearest t)."""
    ts = np.arange(0, T + step / 2, step)
    upper = [z for z in zeros if z.gamma >= 0]
    rows = []
    for t in ts:
        near = min(upper, key=lambda z: (abs(z.gamma - t), -z.beta)) if upper else None
        rows.append((float(t), region_boundary(f, c, float(t)), near.beta if near else None))
    return rows


def write_boundary_csv(path, f, c: float, T: float, zeros, step: float = 0.5) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "boundary_sigma", "nearest_zero_beta"])
        for t, b, beta in boundary_rows(f, c, T, zeros, step):
            w.writerow([f"{t:.12g}", f"{b:.12g}", "" if beta is None else f"{beta:.12g}"])
    return path


def render_region_figure(path, f, c: float, T: float, zeros, boxes=()) -> Path:
    """Zero-free region, scanned boxes and located zeros in the (sigma, t) plane."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Rectangle

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 6))
    ts = np.linspace(0, T, 400)
    sig = [region_boundary(f, c, t) for t in ts]
    ax.fill_betweenx(ts, sig, 1.02, color="#348ABD", alpha=0.25, lw=0, label="certified region")
    ax.plot(sig, ts, color="#348ABD", lw=1.2)
    for b in boxes:
        r = b.rect if hasattr(b, "rect") else b
        if r.t_max <= 0:
            continue
        lo = max(r.t_min, 0)
        ax.add_patch(Rectangle((r.sigma_min, lo), 1.02 - r.sigma_min, r.t_max - lo, fill=False, lw=0.3, ec="0.5"))
    up = [z for z in zeros if z.gamma >= 0]
    if up:
        ax.plot([z.beta for z in up], [z.gamma for z in up], "o", ms=3, color="#A60628", label="zeros")
    ax.axvline(1.0, color="k", lw=0.6, ls=":")
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, T)
    ax.set_xlabel(r"$\sigma$")
    ax.set_ylabel(r"$t$")
    ax.set_title(f"{f.name}, c = {c:g}")
    ax.legend(loc="lower left", fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path
