"""Singular directions and sectors: spec examples plus the count law."""

import math
import random

import pytest

from stokeslab.errors import NonGenericAtPoint
from stokeslab.exponents import ExponentTuple
from stokeslab.gaussian import QQi
from stokeslab.stokes_geometry import (is_simple, sectors,
                                       singular_directions)

TWO_PI = 2 * math.pi


def _tuple_with_tops(tops, m, residues=None):
    r = len(tops)
    residues = residues or [QQi(0)] * r
    a = [[tuple([tops[j]] + [QQi(0)] * (m - 2) + [residues[j]])
          for j in range(r)]]
    d = 0
    return ExponentTuple(r=r, d=d, n=1, m=[m], a=a)


def test_r2_m2_real_delta():
    nu = _tuple_with_tops([QQi(1), QQi(0)], 2)
    t = singular_directions(nu, 0)
    assert t.count == 2
    assert abs(t.directions[0] - 0.0) < 1e-12
    assert abs(t.directions[1] - math.pi) < 1e-12
    assert t.pair_sets[0] == frozenset({(0, 1)})
    assert t.pair_sets[1] == frozenset({(1, 0)})
    assert t.multiplicity_total == (2 - 1) * 2 * 1


def test_r2_m3_example():
    nu = _tuple_with_tops([QQi(1), QQi(0, 1)], 3)
    t = singular_directions(nu, 0)
    expected = sorted([3 * math.pi / 8, 7 * math.pi / 8,
                       11 * math.pi / 8, 15 * math.pi / 8])
    assert t.count == 4
    for got, exp in zip(t.directions, expected):
        assert abs(got - exp) < 1e-12
    assert t.multiplicity_total == (3 - 1) * 2 * 1


def test_nongeneric_rejected():
    nu = _tuple_with_tops([QQi(1), QQi(1)], 2)
    with pytest.raises(NonGenericAtPoint):
        singular_directions(nu, 0)


def test_empty_table_for_fuchsian_point():
    nu = ExponentTuple(r=2, d=0, n=1, m=[1],
                       a=[[(QQi(1),), (QQi(-1),)]])
    t = singular_directions(nu, 0)
    assert t.count == 0


def test_sectors_two_directions():
    nu = _tuple_with_tops([QQi(1), QQi(0)], 2)
    t = singular_directions(nu, 0)
    secs = sectors(t, 0.1)
    assert len(secs) == 2
    assert abs(secs[0].lo + math.pi) < 1e-12 and abs(secs[0].hi) < 1e-12
    assert abs(secs[1].lo) < 1e-12 and abs(secs[1].hi - math.pi) < 1e-12
    # t* angle sits inside the closure of sector 1
    assert secs[0].lo < t.tstar_angle < secs[0].hi


def test_sectors_m3_cyclic_order():
    nu = _tuple_with_tops([QQi(1), QQi(0, 1)], 3)
    t = singular_directions(nu, 0)
    secs = sectors(t, 0.2)
    assert len(secs) == 4
    for a, b in zip(secs, secs[1:]):
        assert abs(a.hi - b.lo) < 1e-15
    assert abs(secs[0].lo - (t.directions[-1] - TWO_PI)) < 1e-15


def test_is_simple_examples():
    assert is_simple(_tuple_with_tops([QQi(1), QQi(0, 1)], 3))
    # collinear differences: tops 0, 1, 2 share arguments
    nu = _tuple_with_tops([QQi(0), QQi(1), QQi(2)], 2)
    assert not is_simple(nu)
    # all m_i = 1 vacuously simple
    nu_f = ExponentTuple(r=2, d=0, n=1, m=[1], a=[[(QQi(1),), (QQi(-1),)]])
    assert is_simple(nu_f)


def _random_generic_tuple(rng, r, m):
    while True:
        tops = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                for _ in range(r)]
        ok = all(abs(tops[p] - tops[q]) > 1e-3
                 for p in range(r) for q in range(p + 1, r))
        if ok:
            break
    a = [[tuple([tops[j]] + [0j] * (m - 1)) for j in range(r)]]
    return ExponentTuple(r=r, d=0, n=1, m=[m], a=a)


def test_count_law_500_random_tuples():
    rng = random.Random(20240817)
    for _ in range(500):
        r = rng.choice([2, 3, 4])
        m = rng.choice([2, 3, 4])
        nu = _random_generic_tuple(rng, r, m)
        t = singular_directions(nu, 0)
        assert t.multiplicity_total == (m - 1) * r * (r - 1)


def test_rotation_of_tops_rotates_directions():
    rng = random.Random(7)
    nu = _random_generic_tuple(rng, 3, 3)
    t0 = singular_directions(nu, 0)
    theta = 0.37
    rot = complex(math.cos(theta), math.sin(theta))
    a_rot = [[tuple(c * rot if k == 0 else c for k, c in enumerate(row))
              for row in nu.a[0]]]
    t1 = singular_directions(
        ExponentTuple(r=3, d=0, n=1, m=[3], a=a_rot), 0)
    shift = theta / (3 - 1)
    expect = sorted(((d + shift) % TWO_PI) for d in t0.directions)
    for got, exp in zip(t1.directions, expect):
        assert abs(got - exp) < 1e-9


def test_directions_depend_only_on_top():
    rng = random.Random(11)
    nu = _random_generic_tuple(rng, 3, 3)
    t0 = singular_directions(nu, 0)
    # perturb mid and res coefficients, keep tops
    a = [[(row[0], complex(rng.random(), rng.random()),
           complex(rng.random(), rng.random())) for row in nu.a[0]]]
    t1 = singular_directions(ExponentTuple(r=3, d=0, n=1, m=[3], a=a), 0)
    assert t0.directions == t1.directions
    assert t0.pair_sets == t1.pair_sets
