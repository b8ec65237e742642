import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgfield import gamma_algebra as ga
from cgfield.gamma_algebra import GaussianRational as GR


def test_gaussian_rational_arithmetic():
    a = GR(1, 2)
    b = GR(Fraction(1, 3), -1)
    assert a * b == GR(Fraction(1, 3) + 2, Fraction(2, 3) - 1)
    assert a - a == GR()
    assert (a / a) == GR(1)
    assert complex(a.conjugate()) == 1 - 2j


@pytest.mark.parametrize("mu,nu", list(itertools.combinations_with_replacement(range(4), 2)))
def test_anticommutator_exact(mu, nu):
    lhs = ga.anticommutator(ga.gamma(mu), ga.gamma(nu))
    assert lhs == ga.identity().scale(2 * ga.metric(mu, nu))


def test_gamma0_is_dirac_diagonal():
    assert np.array_equal(ga.gamma(0).to_complex(), np.diag([1, 1, -1, -1]))


def test_spatial_gamma_blocks():
    for k in range(1, 4):
        g = ga.GAMMA[k]
        assert np.array_equal(g[:2, 2:], ga.PAULI[k - 1])
        assert np.array_equal(g[2:, :2], -ga.PAULI[k - 1])
        assert not g[:2, :2].any() and not g[2:, 2:].any()


def test_gamma_index_out_of_range():
    with pytest.raises(IndexError):
        ga.gamma(4)
    with pytest.raises(IndexError):
        ga.gamma(-1)


def test_gamma5_properties():
    g5 = ga.gamma5()
    assert g5 @ g5 == ga.identity()
    for mu in range(4):
        assert ga.anticommutator(g5, ga.gamma(mu)).is_zero()
    assert np.array_equal(ga.GAMMA5, np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]]))


def test_levi_civita_sign_convention():
    assert ga.levi_civita_upper(0, 1, 2, 3) == 1
    assert ga.levi_civita(0, 1, 2, 3) == -1
    assert ga.levi_civita(1, 0, 2, 3) == 1
    assert ga.levi_civita(0, 0, 2, 3) == 0
    assert ga.LEVI_CIVITA.sum() == 0
    assert np.abs(ga.LEVI_CIVITA).sum() == 24


@pytest.mark.parametrize("s,r,l", list(itertools.product(range(4), repeat=3)))
def test_triple_product_rule(s, r, l):
    direct = ga.gamma_lower(s) @ ga.gamma_lower(r) @ ga.gamma_lower(l)
    assert direct == ga.triple_decompose(s, r, l)


def test_triple_distinct_branch_example():
    # gamma_0 gamma_1 gamma_2 = -i eps_{0123} gamma5 gamma^3 = i gamma5 gamma^3
    out = ga.triple_decompose(0, 1, 2)
    coeffs = dict(zip(ga.BASIS_LABELS, out.basis_coeffs))
    assert coeffs["g5g3"] == GR(0, 1)
    assert sum(1 for c in out.basis_coeffs if c) == 1


def test_triple_metric_branch_example():
    # gamma_0 gamma_0 gamma_1 = g_00 gamma_1 = -gamma^1
    out = ga.triple_decompose(0, 0, 1)
    coeffs = dict(zip(ga.BASIS_LABELS, out.basis_coeffs))
    assert coeffs["g1"] == GR(-1)


def test_basis_expand_gamma0_gamma1():
    prod = ga.gamma(0) @ ga.gamma(1)
    coeffs = dict(zip(ga.BASIS_LABELS, ga.basis_expand(prod)))
    # sigma^{01} = i gamma^0 gamma^1, so gamma^0 gamma^1 = -i sigma^{01}
    assert coeffs["s01"] == GR(0, -1)
    assert all(not c for k, c in coeffs.items() if k != "s01")


def test_basis_is_independent():
    mats = np.array([b.to_complex().ravel() for b in ga.basis()])
    assert np.linalg.matrix_rank(mats) == 16


def test_bad_basis_coeffs_rejected():
    coeffs = [GR()] * 16
    coeffs[0] = GR(1)
    with pytest.raises(ValueError):
        ga.CliffordElement(ga.zero().entries, tuple(coeffs))


small = st.integers(min_value=-3, max_value=3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(small, small), min_size=16, max_size=16))
def test_expand_reconstruct_roundtrip(pairs):
    coeffs = [GR(a, b) for a, b in pairs]
    m = ga.reconstruct(coeffs)
    assert list(ga.basis_expand(m)) == coeffs


def test_selftest_counts():
    recs = ga.selftest()
    assert len(recs) == 74
    assert sum(r["identity"] == "clifford-anticommutator" for r in recs) == 10
    assert all(r["pass"] for r in recs)


def test_float_copies_match_exact():
    for mu in range(4):
        assert np.array_equal(ga.GAMMA[mu], ga.gamma(mu).to_complex())
        assert np.array_equal(ga.GAMMA_LOWER[mu], ga.gamma_lower(mu).to_complex())
