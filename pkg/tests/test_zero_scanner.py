import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import zfr.zero_scanner as zs
from zfr.eval_engine import l_values
from zfr.dlvp_certifier import region_boundary
from zfr.lfunc_model import ClassAxiomError, LFunctionInstance, SatakeSource, catalog, has_real_coefficients, validate_class_axioms
from zfr.zero_scanner import (
    ComplexRectangle,
    Inconclusive,
    Method,
    RefinementError,
    Verdict,
    ZeroCache,
    beta_bound_consistency,
    certification_boxes,
    certify_region,
    count_zeros,
    find_zeros,
    real_segment_scan,
    refine_zero,
    strip_zeros,
    zeros_in,
)

CAT = catalog()
FIRST_ZETA_ZERO = complex(mpmath.zetazero(1))


def _bisection_oracle(f, rect, tol=1e-7):
    """Quarter the box, keeping the quadrant that holds the single zero, until it is small."""
    while max(rect.width, rect.height) > tol:
        sm = (rect.sigma_min + rect.sigma_max) / 2 + 1e-3 * rect.width
        tm = (rect.t_min + rect.t_max) / 2 + 1e-3 * rect.height
        quads = [
            ComplexRectangle(rect.sigma_min, sm, rect.t_min, tm),
            ComplexRectangle(sm, rect.sigma_max, rect.t_min, tm),
            ComplexRectangle(rect.sigma_min, sm, tm, rect.t_max),
            ComplexRectangle(sm, rect.sigma_max, tm, rect.t_max),
        ]
        rect = next(q for q in quads if zeros_in(f, q) == 1)
    return rect.center


def _hardy_sign_changes(t0, t1, n=4000):
    ts = np.linspace(t0, t1, n)
    z = np.array([float(mpmath.siegelz(t)) for t in ts])
    return int(np.sum(np.sign(z[1:]) != np.sign(z[:-1])))


def test_rectangle_invariants():
    with pytest.raises(ValueError):
        ComplexRectangle(1, 0, 0, 1)
    with pytest.raises(ValueError):
        ComplexRectangle(0, 1, 2, 2)
    r = ComplexRectangle(0, 2, -1, 1)
    assert r.contains(1 + 0j) and not r.contains(2 + 0j)
    assert r.boundary_distance(1 + 0j) == 1


def test_count_first_zero_window():
    z = CAT["zeta"]
    assert _hardy_sign_changes(10, 20) == 1
    assert count_zeros(z, ComplexRectangle(0, 1, 10, 20)) == 1


def test_count_right_half_plane_and_pole():
    z = CAT["zeta"]
    assert count_zeros(z, ComplexRectangle(1.1, 2, 0, 50)) == 0
    assert count_zeros(z, ComplexRectangle(0, 1.5, -0.5, 0.5)) == -1
    assert zeros_in(z, ComplexRectangle(0, 1.5, -0.5, 0.5)) == 0


def test_pole_on_boundary_rejected():
    with pytest.raises(ValueError):
        count_zeros(CAT["zeta"], ComplexRectangle(1.0, 2, -0.5, 0.5))


def test_refine_first_zero():
    z = CAT["zeta"]
    rec = refine_zero(z, 0.5 + 14.1j)
    oracle = _bisection_oracle(z, ComplexRectangle(0.4, 0.6, 14.0, 14.2))
    assert abs(rec.rho - (0.5 + 14.134725j)) < 1e-5
    assert abs(rec.rho - oracle) < 1e-5
    assert abs(rec.rho - FIRST_ZETA_ZERO) < 1e-9
    assert rec.method is Method.NEWTON_REFINED and rec.refine_error <= 1e-6


def test_refine_chi4_zero():
    f = CAT["chi_-4"]
    up = refine_zero(f, 0.5 + 6.02j)
    down = refine_zero(f, 0.5 - 6.02j)
    oracle = _bisection_oracle(f, ComplexRectangle(0.45, 0.55, 5.97, 6.07))
    assert abs(up.beta - 0.5) < 1e-6
    assert abs(up.rho - oracle) < 1e-5
    assert abs(up.rho - down.rho.conjugate()) < 1e-8


def test_refine_in_zero_free_area():
    with pytest.raises(RefinementError):
        refine_zero(CAT["zeta"], 0.5 + 12j)
    with pytest.raises(RefinementError):
        refine_zero(CAT["zeta"], 1.5 + 12j)


def test_boundary_zero_perturbation_deterministic():
    # the left edge passes through the first zero
    r = ComplexRectangle(0.5, 1.0, 10, 20)
    a = count_zeros(CAT["zeta"], r)
    assert a in (0, 1) and a == count_zeros(CAT["zeta"], r)


def test_persistent_boundary_zero(monkeypatch):
    monkeypatch.setattr(zs, "BOUNDARY_THRESHOLD", 1e6)
    with pytest.raises(Inconclusive):
        count_zeros(CAT["zeta"], ComplexRectangle(0, 1, 10, 20))


@pytest.mark.parametrize("name", ["zeta", "zeta_chi_-4", "zeta_chi_5.1", "dedekind_5"])
def test_split_additivity(name):
    f = CAT[name]
    rng = np.random.default_rng(11)
    rect = ComplexRectangle(0.05, 0.95, 2.0, 26.0)
    total = count_zeros(f, rect)
    for _ in range(50):
        m = rng.uniform(rect.t_min + 0.1, rect.t_max - 0.1)
        a = count_zeros(f, ComplexRectangle(rect.sigma_min, rect.sigma_max, rect.t_min, m))
        b = count_zeros(f, ComplexRectangle(rect.sigma_min, rect.sigma_max, m, rect.t_max))
        assert a + b == total


def test_riemann_von_mangoldt_count():
    # N(T) for zeta: 10 zeros with 0 < t < 50
    assert count_zeros(CAT["zeta"], ComplexRectangle(0, 1, 1, 50)) == 10


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(sorted(CAT)),
    st.floats(1.001 + 1e-3, 3.0),
    st.floats(0.05, 1.0),
    st.floats(-50, 50),
    st.floats(0.1, 10),
)
def test_no_zeros_right_of_one(name, s0, w, t0, h):
    f = CAT[name]
    assert count_zeros(f, ComplexRectangle(s0, s0 + w, t0, t0 + h)) == 0


def test_conjugate_symmetry_of_zeros():
    for name in ("zeta_chi_-4", "dedekind_5", "zeta_chi_8.1.0"):
        f = CAT[name]
        assert has_real_coefficients(f)
        up = find_zeros(f, ComplexRectangle(0.02, 0.98, 0.5, 25))
        down = find_zeros(f, ComplexRectangle(0.02, 0.98, -25, -0.5))
        assert len(up) == len(down) > 0
        for a, b in zip(up, sorted(down, key=lambda z: -z.gamma)):
            assert abs(a.beta - b.beta) < 1e-8
            assert abs(a.gamma + b.gamma) < 1e-8


def test_strip_zeros_known_values():
    zeros = strip_zeros(CAT["zeta"], 31.5)
    pos = [z.gamma for z in zeros if z.gamma > 0]
    ref = [float(mpmath.zetazero(k).imag) for k in range(1, 5)]
    assert np.allclose(pos, ref, atol=1e-9)
    assert all(abs(z.beta - 0.5) < 1e-9 for z in zeros)


def test_complex_character_zeros_not_symmetric():
    zeros = strip_zeros(CAT["zeta_chi_5.1"], 10)
    pos = sorted(z.gamma for z in zeros if z.gamma > 0)
    neg = sorted(-z.gamma for z in zeros if z.gamma < 0)
    assert pos != pytest.approx(neg)


def _dense_sign_oracle(f):
    grid = np.linspace(0.75, 1 - 1e-3, 2500)
    v = l_values(f, grid + 0j).real
    return int(np.sum(np.sign(v[1:]) != np.sign(v[:-1])))


@pytest.mark.parametrize("name", ["zeta", "zeta_chi_-4", "dedekind_5"])
def test_real_segment_scan_examples(name):
    f = CAT[name]
    assert _dense_sign_oracle(f) == 0
    assert real_segment_scan(f) == []


def test_real_segment_agrees_with_argument_principle():
    f = CAT["zeta_chi_-4"]
    assert zeros_in(f, ComplexRectangle(0.75, 0.999, -0.01, 0.01)) == 0


def test_real_segment_complex_instance():
    assert real_segment_scan(CAT["zeta_chi_5.1"]) == []


def test_certify_examples():
    for name in ("zeta", "zeta_chi_-4"):
        rep = certify_region(CAT[name], 0.05, 30)
        assert rep.verdict is Verdict.CERTIFIED
        assert rep.exceptional["capacity_count"] == 0
        assert all(b.nonreal_zeros == 0 for b in rep.boxes)
        assert rep.c_proof == pytest.approx(1 / 4200)


def test_certify_complex_instance_scans_both_sides():
    rep = certify_region(CAT["zeta_chi_5.1"], 0.05, 10)
    assert not rep.symmetric
    assert any(b.rect.t_max < 0 for b in rep.boxes)
    assert rep.verdict is Verdict.CERTIFIED


def test_certify_detects_zero_when_c_is_huge():
    # c = 2.5 pushes the boundary left of the critical line for t >= 10
    rep = certify_region(CAT["zeta"], 2.5, 20)
    assert rep.verdict is Verdict.ZERO_FOUND
    assert abs(rep.zero.rho - FIRST_ZETA_ZERO) < 1e-6


def test_certify_rejects_sign_violation():
    bad = SatakeSource(((2, (-1.0,)), (3, (1.0,))))
    f = LFunctionInstance("signs", 1, 1, (0,), 0, 1, bad)
    with pytest.raises(ClassAxiomError):
        certify_region(f, 0.05, 10)
    with pytest.raises(ClassAxiomError):
        certify_region(CAT["chi_-4"], 0.05, 10)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=50).filter(lambda k: k.real > -1), min_size=1, max_size=8), st.integers(1, 10**6))
def test_degree_below_log_conductor_always(kappas, q):
    # every factor |kappa| + 3 is at least 3 > e
    f = LFunctionInstance("toy", len(kappas), q, tuple(kappas), 0, 1, SatakeSource(((2, (0.0,) * len(kappas)),)))
    assert validate_class_axioms(f, 2).conductor_ok


def test_certify_argument_checks():
    with pytest.raises(ValueError):
        certify_region(CAT["zeta"], 0.05, 61)
    with pytest.raises(ValueError):
        certify_region(CAT["zeta"], 0, 10)


def test_boxes_cover_region():
    f = CAT["zeta_chi_-4"]
    boxes = certification_boxes(f, 0.05, 30, symmetric=True)
    assert all(b.height <= 1 + 1e-12 for b in boxes)
    for t in np.linspace(0, 30, 301):
        covering = [b for b in boxes if b.t_min <= t <= b.t_max]
        assert covering
        assert min(b.sigma_min for b in covering) <= region_boundary(f, 0.05, t) - 1e-3 + 1e-12


def test_beta_bound_consistency():
    zeros = strip_zeros(CAT["zeta_chi_-4"], 20)
    rows = beta_bound_consistency(CAT["zeta_chi_-4"], zeros)
    assert rows and all(r["ok"] for r in rows)


def test_zero_cache_roundtrip(tmp_path):
    cache = ZeroCache(tmp_path / "z.jsonl")
    zeros = strip_zeros(CAT["zeta"], 15)
    cache.append("zeta", zeros)
    cache.append("zeta", zeros)
    back = cache.load("zeta")
    assert len(back) == len(zeros)
    assert all(abs(a.rho - b.rho) < 1e-15 for a, b in zip(back, zeros))
    assert cache.load("other") == []


def test_zero_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ZFR_CACHE_DIR", str(tmp_path / "cc"))
    assert ZeroCache().path == tmp_path / "cc" / "zeros.jsonl"


def test_threads_do_not_change_result():
    a = certify_region(CAT["dedekind_5"], 0.05, 12, threads=1)
    b = certify_region(CAT["dedekind_5"], 0.05, 12, threads=3)
    assert a.to_dict() == b.to_dict()
