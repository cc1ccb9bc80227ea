"""Random sample points of the monodromy-data variety.

Builders used by the verification suite: draw every coordinate of S(nu)
but one link freely, then solve the remaining link so that the relation
mu = I holds exactly (to machine precision).  The solved factor is
conjugate to the prescribed local monodromy at a regular point, whose
residues are read back from the eigenvalues; the Fuchs relation then
pins the degree.
"""

import cmath
import math

import numpy as np

from .config import DEFAULT, RunConfig
from .exponents import ExponentTuple, classify, formal_monodromy
from .monodromy import MonodromyData, relation_mu, relation_residual
from .stokes_geometry import direction_tables


def random_exponent_tuple(rng, r, m, spread=1.0):
    """Random float exponent tuple, generic and simple with prob. 1."""
    n = len(m)
    while True:
        a = []
        for mi in m:
            rows = []
            for _ in range(r):
                coeffs = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                          for _ in range(mi)]
                coeffs[-1] = complex(rng.uniform(0.05, 0.95) * spread,
                                     rng.uniform(-0.3, 0.3) * spread)
                rows.append(tuple(coeffs))
            a.append(tuple(rows))
        # enforce the Fuchs relation by adjusting one residue to make the
        # total an exact integer (d = 0 after the correction)
        total = sum(row[-1] for pt in a for row in pt)
        first = list(list(map(list, pt)) for pt in a)
        first[0][0][-1] -= total
        a = tuple(tuple(tuple(row) for row in pt) for pt in first)
        nu = ExponentTuple(r=r, d=0, n=n, m=m, a=a)
        c = classify(nu)
        if c.generic and not c.resonant and not c.reducible and c.simple:
            return nu


def _principal_residue(eig: complex) -> complex:
    # a with exp(-2 pi i a) = eig, Re(a) in [0, 1)
    a = -cmath.log(eig) / (2j * math.pi)
    return complex(a.real % 1.0, a.imag)


def random_variety_point(g: int, r: int, m, rng,
                         cfg: RunConfig = DEFAULT,
                         max_tries: int = 40):
    """(MonodromyData, nu) with relation residual at machine precision.

    m is the list of pole orders; the last point must be regular
    (m_n = 1) because its link absorbs the relation.  Handles A_k, B_k
    are drawn freely for genus g (their commutators are solved into the
    last link as well).
    """
    n = len(m)
    if m[-1] != 1:
        raise ValueError("the last point must have m = 1")
    for _ in range(max_tries):
        nu = random_exponent_tuple(rng, r, list(m))
        tables = direction_tables(nu, cfg)
        patterns = [list(t.pair_sets) for t in tables]
        gamma = [np.array(formal_monodromy(nu).eigenvalues[i])
                 for i in range(n)]
        stokes = []
        for i in range(n):
            row = []
            for pat in patterns[i]:
                st = np.eye(r, dtype=complex)
                for (j1, j2) in pat:
                    st[j2, j1] = complex(rng.uniform(-1, 1),
                                         rng.uniform(-1, 1))
                row.append(st)
            stokes.append(row)
        links = [_random_gl(rng, r) for _ in range(n)]
        A = [_random_gl(rng, r) for _ in range(g)]
        B = [_random_gl(rng, r) for _ in range(g)]

        trial = MonodromyData(r=r, patterns=patterns, gamma=gamma,
                              stokes=stokes, links=links, A=A, B=B)
        # solve the last link: mu = F_n * rest = I with
        # F_n = L_n^{-1} gamma_n L_n  =>  L_n diagonalizes rest^{-1}
        partial = MonodromyData(
            r=r, patterns=patterns[:-1] + [[]],
            gamma=gamma[:-1] + [np.ones(r, dtype=complex)],
            stokes=stokes[:-1] + [[]],
            links=links[:-1] + [np.eye(r, dtype=complex)], A=A, B=B)
        rest = relation_mu(partial)   # = I * rest since Top_n = I, L_n = I
        w = np.linalg.inv(rest)
        evals, evecs = np.linalg.eig(w)
        if min(abs(evals[p] - evals[q]) for p in range(r)
               for q in range(p + 1, r)) < 1e-3:
            continue
        order = np.argsort(np.angle(evals))
        evals = evals[order]
        evecs = evecs[:, order]
        link_n = np.linalg.inv(evecs)
        res_n = [_principal_residue(ev) for ev in evals]

        # rebuild nu with the solved residues at the last point
        a = [list(map(list, pt)) for pt in nu.a]
        for j in range(r):
            a[-1][j][-1] = res_n[j]
        total = sum(row[-1] for pt in a for row in pt)
        d = -round(total.real)
        if abs(total - round(total.real)) > 1e-9:
            continue
        nu2 = ExponentTuple(r=r, d=d, n=n, m=list(m),
                            a=[tuple(tuple(row) for row in pt) for pt in a])
        c = classify(nu2, cfg)
        if not (c.generic and not c.resonant and not c.reducible):
            continue
        gamma2 = [np.array(formal_monodromy(nu2).eigenvalues[i])
                  for i in range(n)]
        data = MonodromyData(r=r, patterns=patterns, gamma=gamma2,
                             stokes=stokes,
                             links=links[:-1] + [link_n], A=A, B=B)
        _, resid = relation_residual(data)
        if resid < 1e-10:
            return data, nu2
    raise RuntimeError("failed to sample a variety point; widen max_tries")


def _random_gl(rng, r, tries=200):
    # bounded condition number keeps the 1e-12 action-law checks honest
    for _ in range(tries):
        mtx = np.array([[complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
                         for _ in range(r)] for _ in range(r)])
        svals = np.linalg.svd(mtx, compute_uv=False)
        if svals[-1] > 0.25 and svals[0] / svals[-1] < 8.0:
            return mtx
    raise RuntimeError("could not draw a well-conditioned GL matrix")


def reducible_diagonal_point(rng):
    """Negative control for the rank test: fully diagonal P_VI-type data
    (all links I, gamma products telescoping to I)."""
    thetas = [0.3, 0.3, 0.2, 0.2]
    gamma = [np.array([cmath.exp(-2j * math.pi * t),
                       cmath.exp(2j * math.pi * t)]) for t in thetas]
    patterns = [[] for _ in range(4)]
    stokes = [[] for _ in range(4)]
    links = [np.eye(2, dtype=complex) for _ in range(4)]
    return MonodromyData(r=2, patterns=patterns, gamma=gamma,
                         stokes=stokes, links=links)


def pv_connection(offdiag=(0.4 + 0.0j, 0.3 + 0.0j),
                  c21_first_row=(0.2 + 0.1j, 0.8 + 0.0j)):
    """Rank-2 fixture with orders (2,1,1) at (0, 1, 3), infinity ordinary.

    Built in the slice where the leading coefficient at the irregular
    point is diagonal: C12 = diag(-1.1, 1.3) so the top exponents are
    (1.1, -1.3) (two singular rays at arguments 0 and pi, both simple).
    Residue matrices sum to zero, so the degree is 0.
    """
    from .rh_numeric import RationalConnection, detect_exponents
    a1_res = (0.23 + 0.05j, -0.41 + 0.11j)
    c12 = np.diag([-1.1, 1.3]).astype(complex)
    c11 = np.array([[-a1_res[0], offdiag[0]],
                    [offdiag[1], -a1_res[1]]], dtype=complex)
    e2 = (0.31 + 0.07j, -0.54 - 0.02j)   # eigenvalues of C21
    alpha, beta = c21_first_row
    s2, p2 = e2[0] + e2[1], e2[0] * e2[1]
    delta = s2 - alpha
    gamma = (alpha * delta - p2) / beta
    c21 = np.array([[alpha, beta], [gamma, delta]], dtype=complex)
    c31 = -(c11 + c21)
    conn = RationalConnection(
        r=2, points=[0.0 + 0.0j, 1.0 + 0.0j, 3.0 + 0.0j],
        orders=[2, 1, 1],
        C=[[c11, c12], [c21], [c31]])
    nu = detect_exponents(conn)
    return conn, nu


def pvi_connection(t_last=3.4 + 0.0j,
                   thetas=(0.62 + 0.14j, 0.44 - 0.21j, 0.35 + 0.08j)):
    """Rank-2 Fuchsian fixture with four points (Schlesinger-ready):
    residue matrices with eigenvalues +-theta_i/2 at (0, 1, 2.2) and the
    last residue balancing the sum to zero."""
    from .rh_numeric import RationalConnection, detect_exponents
    mixers = [
        np.array([[1.0, 0.4], [-0.3, 1.1]], dtype=complex),
        np.array([[0.9, -0.5], [0.35, 1.2]], dtype=complex),
        np.array([[1.2, 0.25], [0.5, 0.8]], dtype=complex),
    ]
    residues = []
    for th, g in zip(thetas, mixers):
        d = np.diag([th / 2, -th / 2]).astype(complex)
        residues.append(g @ d @ np.linalg.inv(g))
    residues.append(-(residues[0] + residues[1] + residues[2]))
    points = [0.0 + 0.0j, 1.0 + 0.0j, 2.2 + 0.0j, complex(t_last)]
    conn = RationalConnection(r=2, points=points, orders=[1, 1, 1, 1],
                              C=[[res] for res in residues])
    nu = detect_exponents(conn)
    return conn, nu


def random_group_element(rng, r, n):
    from .monodromy import GroupElement
    sigma = _random_gl(rng, r)
    local = []
    for _ in range(n):
        mags = [rng.uniform(0.4, 2.0) for _ in range(r)]
        args = [rng.uniform(0, 2 * math.pi) for _ in range(r)]
        local.append(np.array([m * cmath.exp(1j * a)
                               for m, a in zip(mags, args)]))
    return GroupElement(sigma, local)
