"""Formal connections over C[[z]]/(z^N) with pole order m.

A FormalConnection represents v |-> dv + A v dz with A an r x r matrix
of truncated Laurent series of valuation >= -m.  Working modulo z^N
means the dz-coefficients of A are known on exponents [-m, N-m); every
entry therefore carries truncation order N - m, and unit gauges carry
order N.  This is exactly the reduction \nabla (x) C[z]/(z^N) used for
the depth pathology: the same connection truncated at different N can
have genuinely different invariants.

The generic diagonalizer implements the splitting lemma order by order:
after conjugating the leading coefficient to diagonal form with
distinct eigenvalues, each off-diagonal order is killed by a gauge
factor I + G z^s solved from a Sylvester equation in the leading
eigenvalues (shifted by s when m = 1, which is where resonance
obstructs).
"""

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linear
from .config import DEFAULT, RunConfig
from .errors import (BadExponentSupport, DepthBelowPoleOrder,
                     NonGenericLeadingTerm, NonInvertibleGauge,
                     ResonantRegular)
from .gaussian import GaussianRational, QQi, as_scalar, is_exact, \
    scalar_is_zero, to_complex
from .series import Series


# -- series matrices ----------------------------------------------------------

def smat_identity(r, N, exact=True):
    one = Series.one(N, exact=exact)
    zero = Series.zero(N)
    return [[one if i == j else zero for j in range(r)] for i in range(r)]


def smat_mul(a, b):
    r, k, c = len(a), len(b), len(b[0])
    out = []
    for i in range(r):
        row = []
        for j in range(c):
            s = a[i][0] * b[0][j]
            for t in range(1, k):
                s = s + a[i][t] * b[t][j]
            row.append(s)
        out.append(row)
    return out


def smat_add(a, b):
    return [[a[i][j] + b[i][j] for j in range(len(a[0]))]
            for i in range(len(a))]


def smat_derivative(a):
    return [[e.derivative() for e in row] for row in a]


def smat_det(a):
    r = len(a)
    if r == 1:
        return a[0][0]
    if r == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = None
    for j in range(r):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * smat_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def smat_inverse(a):
    """Inverse via adjugate / det; supports meromorphic matrices as long
    as det has a visible nonzero coefficient."""
    r = len(a)
    d = smat_det(a)
    if d.is_zero():
        raise NonInvertibleGauge("determinant vanishes to known order")
    dinv = d.inverse()
    if r == 1:
        return [[dinv]]
    cof = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            minor = [row[:j] + row[j + 1:]
                     for k, row in enumerate(a) if k != i]
            c = smat_det(minor)
            if (i + j) % 2:
                c = -c
            cof[j][i] = c * dinv   # adjugate transpose folded in
    return cof


def smat_max_abs(a):
    m = 0.0
    for row in a:
        for e in row:
            for _, v in e.items():
                m = max(m, abs(to_complex(v)))
    return m


# -- the connection type --------------------------------------------------------


class FormalConnection:
    """r x r connection matrix over C[[z]]/(z^N) with poles of order <= m.

    filtration, when present, is a list over j = 0..r-1 of generator
    lists for the submodules l_j (each generator a length-r column of
    series); fixtures build it from an adapted frame whose tail columns
    span each step.
    """

    __slots__ = ("r", "m", "N", "A", "filtration", "frame")

    def __init__(self, A, m=None, N=None, filtration=None, frame=None):
        r = len(A)
        vals = [e.valuation() for row in A for e in row
                if e.valuation() is not None]
        observed_pole = max((-v for v in vals), default=0)
        m_eff = max(1, observed_pole) if m is None else int(m)
        if observed_pole > m_eff:
            raise BadExponentSupport(
                f"entry valuation below -m = {-m_eff}")
        n_entries = min(e.N for row in A for e in row)
        N_eff = n_entries + m_eff if N is None else min(int(N),
                                                        n_entries + m_eff)
        if N_eff < m_eff:
            raise DepthBelowPoleOrder(f"N = {N_eff} < m = {m_eff}")
        A = [[e.truncate(N_eff - m_eff) for e in row] for row in A]
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "m", m_eff)
        object.__setattr__(self, "N", N_eff)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "filtration", filtration)
        object.__setattr__(self, "frame", frame)

    def __setattr__(self, *a):
        raise AttributeError("FormalConnection is immutable")

    @classmethod
    def with_frame(cls, A, frame, m=None, N=None):
        """Attach the filtration spanned by the tail columns of frame."""
        r = len(A)
        filtration = []
        for j in range(r):
            gens = [[frame[p][q] for p in range(r)] for q in range(j, r)]
            filtration.append(gens)
        return cls(A, m=m, N=N, filtration=filtration, frame=frame)

    def is_exact(self):
        return all(e.is_exact() for row in self.A for e in row)

    def leading_matrix(self):
        return [[entry.coeff(-self.m) for entry in row] for row in self.A]

    def step_exponents(self, cfg: RunConfig = DEFAULT):
        """Per-step exponents of the filtration: gauge by the adapted frame
        and read the diagonal polar parts (the result must be lower
        triangular to truncation order)."""
        if self.frame is None:
            raise ValueError("connection carries no adapted frame")
        gauged = gauge(self, self.frame)
        tol = cfg.float_eq * max(1.0, smat_max_abs(gauged.A))
        for p in range(self.r):
            for q in range(p + 1, self.r):
                entry = gauged.A[p][q]
                if not entry.agrees_with(Series.zero(entry.N), tol):
                    raise ValueError(
                        "frame does not lower-triangularize the connection")
        return [gauged.A[j][j].polar_part() for j in range(self.r)]

    def __repr__(self):
        return f"FormalConnection(r={self.r}, m={self.m}, N={self.N})"


# -- constructors ----------------------------------------------------------------


def make_V(nu, r: int, N: int) -> FormalConnection:
    """The model V(nu, r): nu * I plus z^-1 times the shift e_j -> e_{j-1}
    (the z^-1 sits in row j-1, column j)."""
    if isinstance(nu, (int, GaussianRational)):
        nu = Series({-1: nu}, N) if nu != 0 else Series.zero(N)
    bad = [e for e in nu.support() if e > -1]
    if bad:
        raise BadExponentSupport(f"exponent {bad[0]} > -1 in nu")
    v = nu.valuation()
    m = max(1, -v) if v is not None else 1
    exact = nu.is_exact()
    entries = [[Series.zero(N - m) for _ in range(r)] for _ in range(r)]
    shift_coeff = QQi(1) if exact else 1.0 + 0j
    for j in range(r):
        entries[j][j] = Series(dict(nu.items()), N - m)
        if j > 0:
            entries[j - 1][j] = Series({-1: shift_coeff}, N - m)
    return FormalConnection(entries, m=m, N=N)


def gauge(conn: FormalConnection, g) -> FormalConnection:
    """Basis change A' = g^{-1} A g + g^{-1} g' (a left group action:
    gauge(gauge(c, g), h) = gauge(c, g h))."""
    ginv = smat_inverse(g)
    moved = smat_mul(ginv, smat_add(smat_mul(conn.A, g), smat_derivative(g)))
    return FormalConnection(moved)


def rank1_polar_normalize(conn: FormalConnection):
    """Split off the regular part of a rank-1 connection: returns the polar
    exponent and the gauge exp(-int regular part) realizing it."""
    if conn.r != 1:
        raise ValueError("rank1_polar_normalize needs r = 1")
    f = conn.A[0][0]
    polar = f.polar_part()
    mu = f.regular_part().antiderivative()
    g = (-mu).exp()
    return polar, g


# -- generic diagonalization -----------------------------------------------------


def _leading_eigensystem(conn: FormalConnection, cfg: RunConfig):
    lead = conn.leading_matrix()
    if conn.is_exact():
        eigs = linear.exact_eigenvalues(lead)
        for p in range(conn.r):
            for q in range(p + 1, conn.r):
                if eigs[p] == eigs[q]:
                    raise NonGenericLeadingTerm(
                        "leading matrix has a repeated eigenvalue")
        order = sorted(range(conn.r),
                       key=lambda j: (eigs[j].re, eigs[j].im))
        eigs = [eigs[j] for j in order]
        P = linear.exact_eigenvectors(lead, eigs)
        return eigs, P
    arr = linear.to_numpy(lead)
    w, v = np.linalg.eig(arr)
    scale = max(1.0, float(np.max(np.abs(w))))
    for p in range(conn.r):
        for q in range(p + 1, conn.r):
            if abs(w[p] - w[q]) <= cfg.float_eq * scale:
                raise NonGenericLeadingTerm(
                    "leading matrix has (numerically) repeated eigenvalues")
    order = sorted(range(conn.r), key=lambda j: (w[j].real, w[j].imag))
    eigs = [complex(w[j]) for j in order]
    P = [[complex(v[i, j]) for j in order] for i in range(conn.r)]
    return eigs, P


def _check_nonresonant(eigs, exact: bool, tol: float):
    for p in range(len(eigs)):
        for q in range(len(eigs)):
            if p == q:
                continue
            diff = eigs[p] - eigs[q]
            if exact:
                if isinstance(diff, GaussianRational) and diff.im == 0 \
                        and diff.re.denominator == 1 and diff.re != 0:
                    raise ResonantRegular(
                        f"integer eigenvalue difference {diff}")
            else:
                z = to_complex(diff)
                if abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol \
                        and round(z.real) != 0:
                    raise ResonantRegular(
                        f"integer eigenvalue difference {z}")


def formal_diagonalize_generic(conn: FormalConnection,
                               cfg: RunConfig = DEFAULT):
    """Split a connection with distinct leading eigenvalues into rank-1
    polar exponents.

    Returns (exponents, g) with exponents a list of r polar series and g
    the accumulated gauge; gauge(conn, g) is diagonal with exactly those
    entries through the truncation order.
    """
    r, m, N = conn.r, conn.m, conn.N
    exact = conn.is_exact()
    eigs, P = _leading_eigensystem(conn, cfg)
    if m == 1:
        _check_nonresonant(eigs, exact, cfg.integrality)

    gauge_N = N + m
    one = QQi(1) if exact else 1.0 + 0j
    P_series = [[Series({0: P[i][j]}, gauge_N) for j in range(r)]
                for i in range(r)]
    total = P_series
    current = gauge(conn, P_series)

    for s in range(1, N):
        e = -m + s
        if e >= current.N - current.m:
            break
        C = [[current.A[p][q].coeff(e) for q in range(r)] for p in range(r)]
        G = [[None] * r for _ in range(r)]
        nontrivial = False
        for p in range(r):
            for q in range(r):
                if p == q:
                    G[p][q] = as_scalar(0) if exact else 0j
                    continue
                denom = eigs[p] - eigs[q]
                if m == 1:
                    denom = denom + s
                val = -(C[p][q] / denom)
                G[p][q] = val
                if not scalar_is_zero(val, 0.0):
                    nontrivial = True
        if not nontrivial:
            continue
        factor = smat_identity(r, gauge_N, exact=exact)
        for p in range(r):
            for q in range(r):
                if p != q and not scalar_is_zero(G[p][q]):
                    factor[p][q] = Series({s: G[p][q]}, gauge_N)
        total = smat_mul(total, factor)
        current = gauge(current, factor)

    # residual off-diagonal must vanish to known order
    tol = cfg.float_eq * max(1.0, smat_max_abs(current.A))
    for p in range(r):
        for q in range(r):
            if p == q:
                continue
            entry = current.A[p][q]
            if not entry.agrees_with(Series.zero(entry.N), tol):
                raise NonGenericLeadingTerm(
                    "off-diagonal terms survived the splitting")

    # absorb regular diagonal tails via exp(-int tail)
    exps, tail_gauge = [], []
    for j in range(r):
        diag = current.A[j][j]
        exps.append(diag.polar_part())
        tail = diag.regular_part()
        if tail.is_zero():
            tail_gauge.append(Series.one(gauge_N, exact=exact))
        else:
            tail_gauge.append((-tail.antiderivative()).exp())
    if any(not t.agrees_with(Series.one(t.N)) for t in tail_gauge):
        factor = [[tail_gauge[j] if i == j else Series.zero(gauge_N)
                   for j in range(r)] for i in range(r)]
        total = smat_mul(total, factor)
    return exps, total


# -- depth-dependent exponent recovery ---------------------------------------------


@dataclass(frozen=True)
class DepthMatchResult:
    """Outcome of the intertwiner search between filtered connections."""
    isomorphic: bool
    permutation: Optional[tuple]   # sigma with nu^V_i = nu^W_{sigma(i)}
    exponents_differ: bool
    intertwiner: Optional[list]    # r x r series matrix, invertible mod z^N

    @property
    def no_isomorphism(self):
        return not self.isomorphic


def _residues_normalized(exps, cfg):
    for e in exps:
        res = e.coeff(-1) if e.N > -1 else QQi(0)
        x = to_complex(res).real
        if not (-cfg.float_eq <= x < 1.0):
            return False
    return True


def normalize_step_residues(exps):
    """Integer shifts (z^k twists on the filtration lines) moving each
    residue to 0 <= Re < 1; returns (shifted exponents, integer shifts).
    Used when building fixtures for the depth matching."""
    out, shifts = [], []
    for e in exps:
        res = to_complex(e.coeff(-1)).real
        k = -int(np.floor(res))
        shifts.append(k)
        if k:
            shift = Series({-1: QQi(k) if e.is_exact() else complex(k)},
                           e.N)
            e = e + shift
        out.append(e)
    return out, shifts


def _coeff_matrices(A, m, N):
    table = {}
    for e in range(-m, N - m):
        table[e] = [[entry.coeff(e) for entry in row] for row in A]
    return table


def exponents_match_at_depth(V: FormalConnection, W: FormalConnection,
                             cfg: RunConfig = DEFAULT) -> DepthMatchResult:
    """Search for an invertible intertwiner phi with nabla^W phi =
    (phi (x) id) nabla^V modulo z^N, as a dense linear solve over the
    coefficients of phi.

    When an invertible solution exists and the per-step exponent
    multisets agree, the matching permutation is returned.  At depth
    N >= r^2 m with residues in [0,1) an invertible solution forces the
    multisets to agree; below that depth the result can report an
    intertwiner together with differing exponent lists.
    """
    if V.r != W.r or V.N != W.N or V.m != W.m:
        raise ValueError("connections must share r, m and truncation depth")
    r, m, N = V.r, V.m, V.N
    if N < m:
        raise DepthBelowPoleOrder(f"N = {N} < m = {m}")
    exps_v = V.step_exponents(cfg)
    exps_w = W.step_exponents(cfg)
    if not (_residues_normalized(exps_v, cfg)
            and _residues_normalized(exps_w, cfg)):
        raise ValueError("step residues must satisfy 0 <= Re < 1; "
                         "apply normalize_step_residues when building")

    exact = V.is_exact() and W.is_exact()
    zero = QQi(0) if exact else 0j
    av = _coeff_matrices(V.A, m, N)
    aw = _coeff_matrices(W.A, m, N)
    n_unk = N * r * r

    def unk(k, p, q):
        return k * r * r + p * r + q

    rows = []
    for e in range(-m, N - m):
        for p in range(r):
            for q in range(r):
                row = [zero] * n_unk
                if 0 <= e + 1 < N:
                    row[unk(e + 1, p, q)] = as_scalar(e + 1) if exact \
                        else complex(e + 1)
                for k in range(N):
                    j = e - k
                    if j < -m or j >= N - m:
                        continue
                    AVj, AWj = av[j], aw[j]
                    for t in range(r):
                        row[unk(k, p, t)] = row[unk(k, p, t)] - AVj[t][q]
                        row[unk(k, t, q)] = row[unk(k, t, q)] + AWj[p][t]
                rows.append(row)
    tol = 0.0 if exact else 1e-12
    basis = linear.nullspace(rows, tol)
    if not basis:
        return DepthMatchResult(False, None, _multisets_differ(exps_v, exps_w),
                                None)
    consts = [[[vec[unk(0, p, q)] for q in range(r)] for p in range(r)]
              for vec in basis]
    combo = _invertible_combination(consts, exact)
    if combo is None:
        return DepthMatchResult(False, None,
                                _multisets_differ(exps_v, exps_w), None)
    phi_vec = [zero] * n_unk
    for c, vec in zip(combo, basis):
        for idx in range(n_unk):
            phi_vec[idx] = phi_vec[idx] + c * vec[idx]
    phi = [[Series({k: phi_vec[unk(k, p, q)] for k in range(N)}, N)
            for q in range(r)] for p in range(r)]
    differ = _multisets_differ(exps_v, exps_w)
    perm = None if differ else _match_permutation(exps_v, exps_w)
    return DepthMatchResult(True, perm, differ, phi)


def _multisets_differ(ev, ew):
    remaining = list(ew)
    for e in ev:
        hit = next((i for i, f in enumerate(remaining) if f == e), None)
        if hit is None:
            return True
        remaining.pop(hit)
    return False


def _match_permutation(ev, ew):
    used = set()
    sigma = []
    for e in ev:
        for i, f in enumerate(ew):
            if i not in used and f == e:
                sigma.append(i)
                used.add(i)
                break
    return tuple(sigma)


def _invertible_combination(consts, exact):
    """Coefficients c with det(sum c_i B_i) != 0, or None if the det form
    vanishes identically (decided exactly for r <= 3)."""
    s = len(consts)
    r = len(consts[0])
    zero = as_scalar(0) if exact else 0j
    one = QQi(1) if exact else 1 + 0j

    def detc(coeffs):
        mixed = [[None] * r for _ in range(r)]
        for p in range(r):
            for q in range(r):
                acc = zero
                for c, B in zip(coeffs, consts):
                    acc = acc + c * B[p][q]
                mixed[p][q] = acc
        return linear.det(mixed)

    def basis_vec(i, coeff=one):
        c = [zero] * s
        c[i] = coeff
        return c

    for i in range(s):
        c = basis_vec(i)
        if not scalar_is_zero(detc(c), 1e-12):
            return c

    certified_nonzero = None
    if r <= 3 and s <= (64 if r == 2 else 24):
        # det(sum c_i B_i) is a homogeneous degree-r form in c; expand it
        # and test every coefficient, which decides vanishing exactly.
        coeffs = {}
        for picks in itertools.product(range(s), repeat=r):
            term = _mixed_det(consts, picks, exact)
            key = tuple(sorted(picks))
            coeffs[key] = coeffs.get(key, zero) + term
        nonzero = [k for k, v in coeffs.items()
                   if not scalar_is_zero(v, 1e-12)]
        if not nonzero:
            return None
        certified_nonzero = nonzero

    # a witness exists (certified, or presumed for the r > 3 fallback);
    # search pairs and then widening random integer combinations
    for i in range(s):
        for j in range(i + 1, s):
            for t in (1, -1, 2, -2, 3):
                c = basis_vec(i)
                c[j] = t * one
                if not scalar_is_zero(detc(c), 1e-12):
                    return c
    rng = np.random.default_rng(12345)
    for trial in range(400):
        width = 3 + trial // 40
        c = [as_scalar(int(x)) if exact else complex(int(x))
             for x in rng.integers(-width, width + 1, size=s)]
        if not scalar_is_zero(detc(c), 1e-12):
            return c
    if certified_nonzero is not None:
        raise RuntimeError("determinant form certified nonzero but no "
                           "witness found; widen the search")
    return None


def _mixed_det(consts, picks, exact):
    """Sum over permutations sgn * prod_i B_{picks[i]}[i][sigma(i)]."""
    r = len(consts[0])
    total = as_scalar(0) if exact else 0j
    for sigma in itertools.permutations(range(r)):
        sign = _perm_sign(sigma)
        prod = as_scalar(sign) if exact else complex(sign)
        for i in range(r):
            prod = prod * consts[picks[i]][i][sigma[i]]
        total = total + prod
    return total


def _perm_sign(sigma):
    sign = 1
    seen = [False] * len(sigma)
    for i in range(len(sigma)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# -- the depth-6 counter-example ------------------------------------------------


def counterexample_pair():
    """The two depth-6 presentations with pole order 6 and the explicit
    gauge between them: apparent exponents {z^-6 +/- z^-2} versus
    {z^-6, z^-6}, connected by the basis (1+z^4, -z^2), (-z^2, 1+z^4)."""
    N, m = 6, 6
    nN = N - m
    first = [
        [Series({-6: QQi(1), -2: QQi(1)}, nN), Series({-4: QQi(1)}, nN)],
        [Series.zero(nN), Series({-6: QQi(1), -2: QQi(-1)}, nN)],
    ]
    second = [
        [Series({-6: QQi(1)}, nN), Series({-4: QQi(1)}, nN)],
        [Series.zero(nN), Series({-6: QQi(1)}, nN)],
    ]
    g = [
        [Series({0: QQi(1), 4: QQi(1)}, N), Series({2: QQi(-1)}, N)],
        [Series({2: QQi(-1)}, N), Series({0: QQi(1), 4: QQi(1)}, N)],
    ]
    # both matrices are upper triangular; the stable line is spanned by e_0,
    # so the adapted frame (tail columns span the filtration) swaps the basis
    swap = [[Series.zero(N), Series.one(N)],
            [Series.one(N), Series.zero(N)]]
    conn1 = FormalConnection.with_frame(first, swap, m=m, N=N)
    conn2 = FormalConnection.with_frame(second, swap, m=m, N=N)
    return conn1, conn2, g


def counterexample_pair_at_depth(N: int):
    """The same two connections truncated at depth N >= 6 (their entries
    are exact Laurent polynomials, so deeper reductions are canonical)."""
    m = 6
    nN = N - m
    first = [
        [Series({-6: QQi(1), -2: QQi(1)}, nN), Series({-4: QQi(1)}, nN)],
        [Series.zero(nN), Series({-6: QQi(1), -2: QQi(-1)}, nN)],
    ]
    second = [
        [Series({-6: QQi(1)}, nN), Series({-4: QQi(1)}, nN)],
        [Series.zero(nN), Series({-6: QQi(1)}, nN)],
    ]
    swap = [[Series.zero(N), Series.one(N)],
            [Series.one(N), Series.zero(N)]]
    conn1 = FormalConnection.with_frame(first, swap, m=m, N=N)
    conn2 = FormalConnection.with_frame(second, swap, m=m, N=N)
    return conn1, conn2
