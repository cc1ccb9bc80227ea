"""Exponent tuples: Fuchs relation, classification, decomposition, formal
monodromy."""

import cmath
import math
from fractions import Fraction

import pytest

from stokeslab.config import RunConfig
from stokeslab.errors import ReducibilitySearchTooLarge
from stokeslab.exponents import (ExponentTuple, classify, decompose,
                                 formal_monodromy, fuchs_residue_sum,
                                 fuchsian_tuple, recompose)
from stokeslab.gaussian import QQi

F = Fraction


def test_fuchs_trivial_rank1():
    nu = ExponentTuple(r=1, d=0, n=1, m=[1], a=[[(QQi(0),)]])
    assert fuchs_residue_sum(nu).is_zero()


def test_fuchs_forced_by_relation():
    nu = ExponentTuple(r=2, d=-1, n=1, m=[1],
                       a=[[(QQi(F(1, 2)),), (QQi(F(1, 2)),)]])
    assert fuchs_residue_sum(nu).is_zero()


def test_fuchs_direct_sum_example():
    # r=2, n=4, all orders 1, d=-1, seven residues 0 and one residue 1
    rows = [[QQi(0), QQi(0)]] * 3 + [[QQi(1), QQi(0)]]
    nu = ExponentTuple(r=2, d=-1, n=4, m=[1] * 4, a=[[(x,) for x in row]
                                                     for row in rows])
    assert fuchs_residue_sum(nu).is_zero()


def _simple_irregular_example():
    # r=2, n=1, m=(2): tops (1, i), residues (1/3, -1/3), d=0
    return ExponentTuple(
        r=2, d=0, n=1, m=[2],
        a=[[(QQi(1), QQi(F(1, 3))), (QQi(0, 1), QQi(F(-1, 3)))]])


def test_classify_simple_irregular():
    c = classify(_simple_irregular_example())
    assert c.generic and not c.resonant and not c.reducible and c.simple


def test_classify_resonant():
    nu = fuchsian_tuple([[QQi(F(1, 4)), QQi(F(5, 4))],
                         [QQi(F(-1, 4)), QQi(F(-5, 4))]])
    assert classify(nu).resonant


def test_classify_nongeneric_equal_tops():
    nu = ExponentTuple(r=2, d=0, n=1, m=[2],
                       a=[[(QQi(1), QQi(F(1, 3))), (QQi(1), QQi(F(-1, 3)))]])
    c = classify(nu)
    assert not c.generic
    assert not c.simple


def test_reducible_fuchsian_subset_sum():
    # residues (1/2, -1/2) at a single point: h=1 choice -1/2 not in Z,
    # 1/2 not in Z; but (1/3, 2/3) has h=1 sums not integer while the
    # full set is excluded (h < r), so irreducible.
    nu = fuchsian_tuple([[QQi(F(1, 3)), QQi(F(2, 3))]], d=-1)
    assert not classify(nu).reducible
    # integer residue present -> reducible via h=1
    nu2 = fuchsian_tuple([[QQi(1), QQi(F(1, 3)), QQi(F(2, 3))]], d=-2)
    assert classify(nu2).reducible


def test_reducibility_excludes_h_equal_r():
    # with h = r the Fuchs relation alone would trigger: ensure it does not
    nu = fuchsian_tuple([[QQi(F(1, 3)), QQi(F(-1, 3))]], d=0)
    assert not classify(nu).reducible


def test_reducibility_search_bound():
    nu = _simple_irregular_example()
    with pytest.raises(ReducibilitySearchTooLarge):
        classify(nu, RunConfig(reducibility_bound=0))


def test_classify_permutation_equivariance():
    nu = ExponentTuple(
        r=2, d=0, n=2, m=[2, 1],
        a=[[(QQi(1), QQi(F(1, 5))), (QQi(0, 1), QQi(F(2, 5)))],
           [(QQi(F(-2, 5)),), (QQi(F(-1, 5)),)]])
    base = classify(nu)
    swapped_points = ExponentTuple(r=2, d=0, n=2, m=[1, 2],
                                   a=[nu.a[1], nu.a[0]])
    swapped_levels = ExponentTuple(
        r=2, d=0, n=2, m=[2, 1],
        a=[[nu.a[0][1], nu.a[0][0]], [nu.a[1][1], nu.a[1][0]]])
    assert classify(swapped_points) == base
    assert classify(swapped_levels) == base


# -- decompose -----------------------------------------------------------------

def test_decompose_all_fuchsian():
    nu = fuchsian_tuple([[QQi(F(1, 3)), QQi(F(-1, 3))]] * 4, d=0)
    dec = decompose(nu)
    assert dec.top == {}
    assert all(v == () for v in dec.mid.values())
    assert len(dec.res) == 8
    assert recompose(dec) == nu


def test_decompose_m2_and_m3():
    nu2 = _simple_irregular_example()
    dec = decompose(nu2)
    assert dec.top[(0, 0)] == QQi(1)
    assert dec.mid[(0, 0)] == ()
    assert dec.res[(0, 0)] == QQi(F(1, 3))
    assert recompose(dec) == nu2

    nu3 = ExponentTuple(
        r=1, d=-2, n=1, m=[3], a=[[(QQi(1), QQi(5), QQi(2))]])
    dec3 = decompose(nu3)
    assert dec3.top[(0, 0)] == QQi(1)
    assert dec3.mid[(0, 0)] == (QQi(5),)
    assert dec3.res[(0, 0)] == QQi(2)
    assert recompose(dec3) == nu3


# -- formal monodromy -----------------------------------------------------------

def test_formal_monodromy_values():
    nu = fuchsian_tuple([[QQi(0), QQi(F(1, 2))]], d=0)
    # Fuchs fails for d: sum = 1/2 not integer; build directly instead
    nu = ExponentTuple(r=2, d=0, n=1, m=[1],
                       a=[[(QQi(0),), (QQi(F(1, 2)),)]])
    fm = formal_monodromy(nu)
    assert abs(fm.eigenvalues[0][0] - 1.0) < 1e-15
    assert abs(fm.eigenvalues[0][1] - (-1.0)) < 1e-14


def test_formal_monodromy_integer_shift_invariance():
    nu1 = ExponentTuple(r=2, d=0, n=1, m=[1],
                        a=[[(QQi(F(1, 3)),), (QQi(F(-1, 3)),)]])
    nu2 = ExponentTuple(r=2, d=-3, n=1, m=[1],
                        a=[[(QQi(F(4, 3)),), (QQi(F(5, 3)),)]])
    f1 = formal_monodromy(nu1)
    f2 = formal_monodromy(nu2)
    for a, b in zip(f1.eigenvalues[0], f2.eigenvalues[0]):
        assert abs(a - b) < 1e-13


def test_formal_monodromy_from_decomposition():
    nu = _simple_irregular_example()
    fm = formal_monodromy(decompose(nu))
    expected = cmath.exp(-2j * math.pi / 3)
    assert abs(fm.eigenvalues[0][0] - expected) < 1e-14
