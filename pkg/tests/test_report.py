import csv
import json
import math

import numpy as np

from zfr.dlvp_certifier import region_boundary
from zfr.lfunc_model import catalog
from zfr.report import boundary_rows, canonical, dumps, render_region_figure, write_boundary_csv
from zfr.zero_scanner import certify_region, strip_zeros

CAT = catalog()


def test_canonical_rounding():
    assert canonical(1 / 3) == 0.333333333333
    assert canonical(1 + 2j) == [1.0, 2.0]
    assert canonical(np.float64(2.0) / 3) == 0.666666666667
    assert canonical({"b": np.bool_(True), "a": (np.int64(3),)}) == {"a": [3], "b": True}
    assert canonical(math.inf) == "inf"


def test_dumps_sorted_and_stable():
    a = dumps({"z": 1.0, "a": [0.1 + 0.2, 3]})
    b = dumps({"a": [0.30000000000000004, 3], "z": 1.0})
    assert a == b
    assert list(json.loads(a)) == ["a", "z"]


def test_boundary_csv(tmp_path):
    f = CAT["zeta"]
    zeros = strip_zeros(f, 15)
    p = write_boundary_csv(tmp_path / "b.csv", f, 0.05, 15, zeros)
    rows = list(csv.reader(p.open()))
    assert rows[0] == ["t", "boundary_sigma", "nearest_zero_beta"]
    assert len(rows) == 1 + 31
    t, b, beta = rows[1 + 28]
    assert float(t) == 14.0
    assert abs(float(b) - region_boundary(f, 0.05, 14.0)) < 1e-11
    assert abs(float(beta) - 0.5) < 1e-9


def test_boundary_rows_without_zeros():
    rows = boundary_rows(CAT["zeta"], 0.05, 2, [])
    assert all(r[2] is None for r in rows)


def test_figure(tmp_path):
    f = CAT["zeta_chi_-4"]
    rep = certify_region(f, 0.05, 10)
    p = render_region_figure(tmp_path / "r.png", f, 0.05, 10, strip_zeros(f, 10), rep.boxes)
    assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
