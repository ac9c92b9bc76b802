import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zfr.dirichlet_chars import kronecker_character
from zfr.lfunc_model import (
    CharacterSource,
    catalog,
    ClassAxiomError,
    CoefficientUnavailable,
    LanglandsParameter,
    LFunctionInstance,
    ProductSource,
    SatakeSource,
    ZetaSource,
    analytic_conductor,
    analytic_conductor_at,
    dirichlet_coeff,
    dirichlet_instance,
    dirichlet_table,
    exp_from_lambda,
    lambda_coeff,
    lambda_table,
    validate_class_axioms,
    zeta_instance,
)


_CATALOG = catalog()


def _prime_power(n):
    for p in range(2, n + 1):
        if n % p == 0:
            m = n
            while m % p == 0:
                m //= p
            return p if m == 1 else None
    return None


def test_zeta_lambda_examples():
    z = zeta_instance()
    assert lambda_coeff(z, 8) == pytest.approx(math.log(2))
    assert lambda_coeff(z, 6) == 0
    assert lambda_coeff(z, 1) == 0


def test_product_lambda_cancels_at_3(cat):
    # log zeta + log L(chi_-4), expanded: Lambda(3) + chi(3) Lambda(3)
    chi = kronecker_character(-4)
    oracle = math.log(3) + chi(3) * math.log(3)
    assert oracle == 0
    assert abs(lambda_coeff(cat["zeta_chi_-4"], 3) - oracle) < 1e-15


def test_dirichlet_coeff_examples(cat):
    z = zeta_instance()
    assert all(dirichlet_coeff(z, n) == 1 for n in range(1, 50))
    assert dirichlet_coeff(cat["chi_-4"], 5) == 1
    chi = kronecker_character(-4)
    oracle = sum(chi(5 // a) for a in range(1, 6) if 5 % a == 0)
    assert oracle == 2
    assert dirichlet_coeff(cat["zeta_chi_-4"], 5) == pytest.approx(oracle)


def test_convolution_against_divisor_sum(cat):
    chi = kronecker_character(-4)
    tab = dirichlet_table(cat["zeta_chi_-4"], 300)
    for n in range(1, 301):
        assert abs(tab[n] - sum(chi(d) for d in range(1, n + 1) if n % d == 0)) < 1e-12


def test_validation_examples(cat):
    z = validate_class_axioms(cat["zeta"], 1000)
    assert z.passed and z.nonnegative
    alone = validate_class_axioms(cat["chi_-4"], 1000)
    assert not alone.nonnegative and 3 in alone.negative_at
    prod = validate_class_axioms(cat["zeta_chi_-4"], 1000)
    assert prod.passed and prod.nonnegative


def test_every_product_nonnegative_and_bounded(cat):
    for name, f in cat.items():
        rep = validate_class_axioms(f, 10**4)
        assert rep.bound_ok, name
        if isinstance(f.coeff_source, ProductSource):
            assert rep.nonnegative, name


def test_bound_is_the_stated_one(cat):
    N = 10**4
    n = np.arange(N + 1)
    for f in cat.values():
        lam = lambda_table(f, N)
        assert np.all(np.abs(lam[2:]) <= f.degree * n[2:] * np.log(n[2:]))


def test_analytic_conductor_examples(cat):
    assert analytic_conductor(zeta_instance()) == 3
    assert analytic_conductor(cat["zeta_chi_-4"]) == 48
    f = LFunctionInstance("kappa_i", 1, 1, (1j,), 0, 1, SatakeSource(((2, (0.5,)),)))
    assert analytic_conductor(f) == 4


def test_shifted_conductor_examples(cat):
    z = zeta_instance()
    assert analytic_conductor_at(z, 0) == analytic_conductor(z)
    assert analytic_conductor_at(z, 2j) == 5
    for f in cat.values():
        assert analytic_conductor_at(f, 0) == analytic_conductor(f)


@settings(max_examples=1000, deadline=None)
@given(
    st.sampled_from(["zeta", "zeta_chi_-4", "dedekind_5", "chi_-4", "zeta_chi_12.1.1"]),
    st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False),
)
def test_conductor_bound(name, s):
    f = _CATALOG[name]
    assert analytic_conductor_at(f, s) <= analytic_conductor(f) * (abs(s) + 3) ** f.degree * (1 + 1e-12)


def test_product_additivity(cat):
    chi = kronecker_character(5)
    a, b = zeta_instance(), dirichlet_instance(chi)
    f = cat["zeta_chi_5"]
    for n in range(2, 2000):
        if _prime_power(n):
            assert lambda_coeff(f, n) == pytest.approx(lambda_coeff(a, n) + lambda_coeff(b, n), abs=1e-14)


def test_exp_log_consistency(cat):
    N = 1000
    for name, f in cat.items():
        lam = lambda_table(f, N)
        via_exp = exp_from_lambda(lam)
        direct = dirichlet_table(f, N)
        scale = np.maximum(np.abs(direct[1:]), 1)
        assert np.max(np.abs(via_exp[1:] - direct[1:]) / scale) < 1e-10, name


def test_satake_lambda_and_unavailable():
    a = (0.5 + 0.5j, 0.5 - 0.5j)
    src = SatakeSource(((2, a), (3, (1.0, -1.0)), (5, (2.0, 0.0))))
    f = LFunctionInstance("toy", 2, 1, (0, 0), 0, 1, src)
    assert lambda_coeff(f, 8) == pytest.approx((a[0] ** 3 + a[1] ** 3) * math.log(2))
    assert lambda_coeff(f, 9) == pytest.approx(2 * math.log(3))
    with pytest.raises(CoefficientUnavailable):
        lambda_coeff(f, 7)
    with pytest.raises(CoefficientUnavailable):
        lambda_table(f, 10)
    # Euler factor (1 - a1 x)^-1 (1 - a2 x)^-1 at p = 2
    assert dirichlet_coeff(f, 4) == pytest.approx(a[0] ** 2 + a[0] * a[1] + a[1] ** 2)
    assert dirichlet_coeff(f, 6) == pytest.approx((a[0] + a[1]) * 0)
    rep = validate_class_axioms(f, 30)
    assert 7 in rep.unavailable


def test_satake_rejects_large_parameters():
    with pytest.raises(ValueError):
        SatakeSource(((2, (3.0,)),))
    with pytest.raises(ValueError):
        SatakeSource(((4, (1.0,)),))


def test_instance_invariants():
    with pytest.raises(ClassAxiomError, match="must exceed -1"):
        LanglandsParameter(-1.5)
    with pytest.raises(ClassAxiomError):
        LFunctionInstance("bad", 2, 1, (0,), 1, 1, ZetaSource())
    with pytest.raises(ClassAxiomError):
        LFunctionInstance("bad", 1, 1, (0,), 2, 1, ZetaSource())
    with pytest.raises(ClassAxiomError):
        LFunctionInstance("bad", 1, 1, (0,), 0, 1, ZetaSource())
    with pytest.raises(ClassAxiomError):
        LFunctionInstance("bad", 1, 1, (0,), 1, 2, ZetaSource())


def test_product_degree_is_sum(cat):
    f = cat["zeta_chi_-4"]
    assert f.degree == 2 == sum(g.degree for g in f.coeff_source.factors)
    assert isinstance(f.coeff_source.factors[1], CharacterSource)


def test_catalog_contents(cat):
    assert {"zeta", "chi_-4", "zeta_chi_-4", "zeta_chi_5", "dedekind_-4", "dedekind_5"} <= set(cat)
    from zfr.dirichlet_chars import characters_mod

    n_products = sum(len(characters_mod(q)) - 1 for q in range(2, 13))
    assert len([k for k in cat if k.startswith("zeta_chi_") and "." in k]) == n_products
    for f in cat.values():
        for g in f.factors:
            if isinstance(g, CharacterSource):
                assert f.conductor % g.chi.conductor == 0


def test_character_lambda_matches_definition():
    chi = kronecker_character(-7)
    f = dirichlet_instance(chi)
    for n in range(2, 500):
        p = _prime_power(n)
        expect = chi(n) * math.log(p) if p else 0
        assert cmath.isclose(lambda_coeff(f, n), expect, abs_tol=1e-14)
