"""Formal connections: gauge calculus, the depth-6 counter-example,
generic diagonalization and depth-dependent exponent recovery."""

import random
from fractions import Fraction

import pytest

from stokeslab.errors import (BadExponentSupport, NonGenericLeadingTerm,
                              NonInvertibleGauge, ResonantRegular)
from stokeslab.formal import (FormalConnection, counterexample_pair,
                              counterexample_pair_at_depth,
                              exponents_match_at_depth,
                              formal_diagonalize_generic, gauge, make_V,
                              rank1_polar_normalize, smat_identity, smat_mul)
from stokeslab.gaussian import QQi
from stokeslab.series import Series

F = Fraction


def series(terms, N):
    return Series.from_terms([(e, QQi(c) if isinstance(c, (int, F)) else c)
                              for e, c in terms], N)


# -- make_V ---------------------------------------------------------------------

def test_make_V_rank1():
    conn = make_V(series([(-2, 1)], 6), 1, 6)
    assert conn.r == 1 and conn.m == 2
    assert conn.A[0][0] == series([(-2, 1)], 4)


def test_make_V_rank2_shift_position():
    nu = series([(-3, 2), (-1, 1)], 8)
    conn = make_V(nu, 2, 8)
    assert conn.A[0][0].agrees_with(conn.A[1][1])
    assert conn.A[0][1] == series([(-1, 1)], 8 - 3)
    assert conn.A[1][0].is_zero()


def test_make_V_zero_is_pure_shift():
    conn = make_V(0, 3, 5)
    assert conn.m == 1
    for j in range(3):
        assert conn.A[j][j].is_zero()
    assert not conn.A[0][1].is_zero() and not conn.A[1][2].is_zero()
    assert conn.A[0][2].is_zero() and conn.A[2][0].is_zero()


def test_make_V_rejects_bad_support():
    with pytest.raises(BadExponentSupport):
        make_V(series([(0, 1)], 4), 2, 4)


# -- gauge -----------------------------------------------------------------------

def _random_unit_gauge(rng, r, N):
    """L * U with unit diagonals: determinant exactly 1."""
    low = smat_identity(r, N)
    up = smat_identity(r, N)
    for i in range(r):
        for j in range(r):
            terms = [(e, QQi(F(rng.randint(-2, 2), rng.randint(1, 3)),
                             F(rng.randint(-2, 2), rng.randint(1, 3))))
                     for e in range(0, min(3, N))]
            if i > j:
                low[i][j] = Series.from_terms(terms, N)
            elif i < j:
                up[i][j] = Series.from_terms(terms, N)
    return smat_mul(low, up)


def _random_diag_conn(rng, r, m, N):
    exps = []
    while True:
        tops = [QQi(F(rng.randint(-6, 6), rng.randint(1, 3)),
                    F(rng.randint(-6, 6), rng.randint(1, 3)))
                for _ in range(r)]
        if all(tops[p] != tops[q] for p in range(r)
               for q in range(p + 1, r)):
            break
    for j in range(r):
        terms = {-m: tops[j]}
        for k in range(-m + 1, 0):
            terms[k] = QQi(F(rng.randint(-4, 4), rng.randint(1, 2)))
        exps.append(Series(terms, N - m))
    A = [[exps[i] if i == j else Series.zero(N - m) for j in range(r)]
         for i in range(r)]
    return FormalConnection(A, m=m, N=N), exps


def test_gauge_identity():
    rng = random.Random(1)
    conn, _ = _random_diag_conn(rng, 2, 2, 8)
    out = gauge(conn, smat_identity(2, 10))
    for i in range(2):
        for j in range(2):
            assert out.A[i][j].agrees_with(conn.A[i][j])


def test_gauge_round_trip_and_action_law():
    rng = random.Random(2)
    conn, _ = _random_diag_conn(rng, 2, 2, 8)
    g = _random_unit_gauge(rng, 2, 12)
    h = _random_unit_gauge(rng, 2, 12)
    once = gauge(conn, g)
    from stokeslab.formal import smat_inverse
    back = gauge(once, smat_inverse(g))
    for i in range(2):
        for j in range(2):
            assert back.A[i][j].agrees_with(conn.A[i][j])
    lhs = gauge(gauge(conn, g), h)
    rhs = gauge(conn, smat_mul(g, h))
    for i in range(2):
        for j in range(2):
            assert lhs.A[i][j].agrees_with(rhs.A[i][j])


def test_gauge_rejects_singular():
    conn, _ = _random_diag_conn(random.Random(3), 2, 2, 8)
    g = [[Series.zero(8), Series.zero(8)],
         [Series.zero(8), Series.one(8)]]
    with pytest.raises(NonInvertibleGauge):
        gauge(conn, g)


def test_gauge_reproduces_counterexample_matrix_exactly():
    conn1, conn2, g = counterexample_pair()
    moved = gauge(conn1, g)
    for i in range(2):
        for j in range(2):
            assert moved.A[i][j] == conn2.A[i][j], (i, j)


# -- rank-1 normalization -----------------------------------------------------------

def test_rank1_polar_normalize_spec_example():
    conn = FormalConnection([[series([(-2, 1), (0, 1), (1, 1)], 4)]],
                            m=2, N=6)
    polar, g = rank1_polar_normalize(conn)
    assert polar == series([(-2, 1)], 4)
    # g = exp(-z - z^2/2 - ...): check the first coefficients
    assert g.coeff(0) == QQi(1)
    assert g.coeff(1) == QQi(-1)
    moved = gauge(conn, [[g]])
    assert moved.A[0][0].agrees_with(series([(-2, 1)], moved.A[0][0].N))


def test_rank1_polar_normalize_already_polar():
    conn = FormalConnection([[series([(-1, 5)], 6)]], m=1, N=7)
    polar, g = rank1_polar_normalize(conn)
    assert polar == series([(-1, 5)], 6)
    assert g.agrees_with(Series.one(g.N))


def test_rank1_polar_normalize_zero():
    conn = FormalConnection([[Series.zero(5)]], m=1, N=6)
    polar, g = rank1_polar_normalize(conn)
    assert polar.is_zero()
    assert g.agrees_with(Series.one(g.N))


# -- generic diagonalization ----------------------------------------------------------

def test_diagonalize_diagonal_input():
    conn, exps = _random_diag_conn(random.Random(5), 3, 2, 9)
    got, g = formal_diagonalize_generic(conn)
    assert sorted(map(repr, got)) == sorted(
        map(repr, [e.polar_part() for e in exps]))


def test_diagonalize_round_trip_exact():
    rng = random.Random(7)
    for _ in range(15):
        r = rng.choice([2, 3])
        m = rng.choice([1, 2, 3])
        N = rng.randint(max(2 * m, m + 2), 10)
        conn, exps = _random_diag_conn(rng, r, m, N)
        if m == 1:
            # ensure non-resonance of the random residues
            tops = [e.coeff(-1) for e in exps]
            diffs_int = any((tops[p] - tops[q]).im == 0
                            and (tops[p] - tops[q]).re.denominator == 1
                            for p in range(r) for q in range(r) if p != q)
            if diffs_int:
                continue
        g = _random_unit_gauge(rng, r, N + m)
        conj = gauge(conn, g)
        got, _ = formal_diagonalize_generic(conj)
        want = [e.polar_part() for e in exps]
        key = lambda x: tuple((k, str(v)) for k, v in x.items())
        assert sorted(map(key, got)) == sorted(map(key, want))


def test_diagonalize_verifies_gauge():
    rng = random.Random(11)
    conn, exps = _random_diag_conn(rng, 2, 2, 10)
    g = _random_unit_gauge(rng, 2, 12)
    conj = gauge(conn, g)
    got, total = formal_diagonalize_generic(conj)
    moved = gauge(conj, total)
    for i in range(2):
        for j in range(2):
            if i == j:
                assert moved.A[i][j].agrees_with(got[i])
            else:
                assert moved.A[i][j].agrees_with(
                    Series.zero(moved.A[i][j].N))


def test_diagonalize_rejects_equal_tops():
    conn1, _, _ = counterexample_pair()
    with pytest.raises(NonGenericLeadingTerm):
        formal_diagonalize_generic(conn1)


def test_diagonalize_resonant_regular_rejected():
    A = [[series([(-1, F(1, 2))], 5), series([(-1, 1)], 5)],
         [Series.zero(5), series([(-1, F(5, 2))], 5)]]
    conn = FormalConnection(A, m=1, N=6)
    with pytest.raises(ResonantRegular):
        formal_diagonalize_generic(conn)


def test_diagonalize_meromorphic_twist_shifts_residue():
    # conjugating by diag(z, 1) shifts one residue by an integer only
    rng = random.Random(13)
    conn, exps = _random_diag_conn(rng, 2, 2, 10)
    tw = [[Series({1: QQi(1)}, 12), Series.zero(12)],
          [Series.zero(12), Series.one(12)]]
    twisted = gauge(conn, tw)
    got, _ = formal_diagonalize_generic(twisted)
    want = [e.polar_part() for e in exps]
    shifted = sorted((tuple((k, str(v)) for k, v in x.items()) for x in got))
    ref = []
    for idx, w in enumerate(want):
        if idx == 0:
            w = w + Series({-1: QQi(1)}, w.N)
        ref.append(w)
    ref_key = sorted((tuple((k, str(v)) for k, v in x.items()) for x in ref))
    assert shifted == ref_key


# -- depth matching ----------------------------------------------------------------

def test_counterexample_fixture_matrices():
    conn1, conn2, g = counterexample_pair()
    assert conn1.A[0][0] == series([(-6, 1), (-2, 1)], 0)
    assert conn1.A[0][1] == series([(-4, 1)], 0)
    assert conn1.A[1][0].is_zero()
    assert conn1.A[1][1] == series([(-6, 1), (-2, -1)], 0)
    assert conn2.A[0][0] == series([(-6, 1)], 0)
    assert g[0][0] == series([(0, 1), (4, 1)], 6)
    assert g[0][1] == series([(2, -1)], 6)


def test_step_exponents_of_counterexample():
    conn1, conn2, _ = counterexample_pair()
    e1 = conn1.step_exponents()
    e2 = conn2.step_exponents()
    assert sorted(map(repr, e1)) == sorted(map(repr, [
        series([(-6, 1), (-2, 1)], 0), series([(-6, 1), (-2, -1)], 0)]))
    assert [repr(x) for x in e2] == [repr(series([(-6, 1)], 0))] * 2


def test_match_depth_identity():
    conn1, _, _ = counterexample_pair()
    res = exponents_match_at_depth(conn1, conn1)
    assert res.isomorphic
    assert res.permutation in ((0, 1), (1, 0))
    assert not res.exponents_differ


def test_match_depth6_finds_intertwiner_despite_differing_exponents():
    conn1, conn2, _ = counterexample_pair()
    res = exponents_match_at_depth(conn1, conn2)
    assert res.isomorphic
    assert res.exponents_differ
    assert res.permutation is None


def test_match_depth24_no_invertible_intertwiner():
    conn1, conn2 = counterexample_pair_at_depth(24)
    res = exponents_match_at_depth(conn1, conn2)
    assert not res.isomorphic
    assert res.exponents_differ


def test_match_depth_random_gauge_conjugates_recover_permutation():
    rng = random.Random(17)
    for _ in range(5):
        conn, exps = _random_diag_conn(rng, 2, 2, 16)
        # residues must lie in [0, 1): zero them out
        A = [[conn.A[i][j] if i != j else
              conn.A[i][j] - Series({-1: conn.A[i][j].coeff(-1)},
                                    conn.A[i][j].N)
              for j in range(2)] for i in range(2)]
        frame = smat_identity(2, 16)
        V = FormalConnection.with_frame(
            [[A[1][1] if i == j == 1 else A[0][0] if i == j == 0
              else Series.zero(14) for j in range(2)] for i in range(2)],
            frame, m=2, N=16)
        g = _random_unit_gauge(rng, 2, 18)
        from stokeslab.formal import smat_inverse
        moved = gauge(V, g)
        # the gauged connection is filtered by the image frame g^{-1},
        # whose tail column spans the moved l_1
        W = FormalConnection.with_frame(moved.A, smat_inverse(g),
                                        m=2, N=moved.N)
        res = exponents_match_at_depth(V, W)
        assert res.isomorphic
        assert not res.exponents_differ
        assert res.permutation is not None
