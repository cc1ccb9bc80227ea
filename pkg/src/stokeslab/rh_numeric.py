"""Numerical Riemann-Hilbert map for genus-0 rational connections.

A RationalConnection stores the system dY = A(z) Y dz in partial
fraction form.  Flat sections of the underlying connection are the
solutions of this system, and the generalized exponents in the formal
sense are those of the connection matrix -A: at a Fuchsian point the
exponent residues are the eigenvalues of -Res A, and the canonical
local basis behaves like f_j = exp(-int nu_j) times a unit series.
With that convention the formal monodromy exp(-2 pi i a_{j,-1}) is
literally the effect of one counterclockwise turn on the basis, and the
assembled tuple satisfies the global relation.

Sector solutions at irregular points come from asymptotic matching: the
formal diagonalizing gauge is truncated at its least term on the sector
bisector, at a radius where that term is below tolerance, and the
resulting seed is the unique solution asymptotic to the formal basis on
the sector.  Stokes matrices are the transition matrices between
consecutive seeds, transported across the singular rays.
"""

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, RunConfig
from .errors import (ExponentMismatch, MatchingRadiusNotFound,
                     SupportViolation)
from .exponents import ExponentTuple, classify, formal_monodromy
from .formal import FormalConnection, formal_diagonalize_generic
from .monodromy import MonodromyData, relation_residual
from .series import Series
from .stokes_geometry import SingularDirectionTable, singular_directions
from .transport import Arc, Line, Path, log_increment, transport

TWO_PI = 2.0 * math.pi


class RationalConnection:
    """dY = A(z) Y dz with A = sum_i sum_k C[i][k-1] / (z - t_i)^k + poly.

    points may include None for the point at infinity (poles there are
    encoded by the polynomial part or non-cancelling residues); the
    transports and monodromy assembly need all declared points finite.
    """

    def __init__(self, r, points, orders, C, poly=(), base=None, degree=0):
        self.r = int(r)
        self.points = list(points)
        self.orders = [int(m) for m in orders]
        self.C = [[np.array(c, dtype=complex).reshape(r, r) for c in row]
                  for row in C]
        self.poly = [np.array(p, dtype=complex).reshape(r, r) for p in poly]
        self.base = base
        self.degree = int(degree)
        if len(self.points) != len(self.orders) or \
                len(self.points) != len(self.C):
            raise ValueError("points, orders and C must align")
        for i, (t, m) in enumerate(zip(self.points, self.orders)):
            if t is None:
                if self.C[i]:
                    raise ValueError("the infinite point takes no partial "
                                     "fraction block")
                continue
            if len(self.C[i]) != m:
                raise ValueError(f"point {i}: need {m} coefficient matrices")
            if np.max(np.abs(self.C[i][m - 1])) == 0.0:
                raise ValueError(f"point {i}: pole order is not exactly {m}")

    @property
    def n(self):
        return len(self.points)

    def finite_poles(self):
        return [t for t in self.points if t is not None]

    def scale(self) -> float:
        pts = self.finite_poles()
        if len(pts) < 2:
            return 1.0
        return max(abs(a - b) for a in pts for b in pts)

    def A(self, z: complex) -> np.ndarray:
        out = np.zeros((self.r, self.r), dtype=complex)
        for t, row in zip(self.points, self.C):
            if t is None:
                continue
            w = 1.0 / (z - t)
            acc = w
            for c in row:
                out += c * acc
                acc *= w
        zp = 1.0
        for p in self.poly:
            out += p * zp
            zp *= z
        return out

    def residue_trace_sum(self) -> complex:
        """sum_i tr Res_{t_i}(A dz) over the declared finite points; equals
        -degree for a consistent input."""
        return sum(complex(np.trace(row[0])) for t, row in
                   zip(self.points, self.C) if t is not None)

    def infinity_order(self) -> int:
        """Pole order of the connection at infinity (0 = ordinary)."""
        nonzero_poly = [j for j, p in enumerate(self.poly)
                        if np.max(np.abs(p)) > 0]
        if nonzero_poly:
            return max(nonzero_poly) + 2
        res = np.zeros((self.r, self.r), dtype=complex)
        for t, row in zip(self.points, self.C):
            if t is not None:
                res += row[0]
        if np.max(np.abs(res)) > 1e-14:
            return 1
        return 0

    def connection_series(self, i: int, N: int) -> FormalConnection:
        """Expansion of the connection matrix -A at point i to depth N in
        the local coordinate z - t_i (w = 1/z at infinity)."""
        t = self.points[i]
        if t is None:
            return self._connection_series_infinity(N)
        m = self.orders[i]
        n_series = N - m
        entries = [[dict() for _ in range(self.r)] for _ in range(self.r)]

        def add(e, mat):
            if e >= n_series:
                return
            for p in range(self.r):
                for q in range(self.r):
                    v = mat[p, q]
                    if v != 0:
                        entries[p][q][e] = entries[p][q].get(e, 0.0) + v

        for k, c in enumerate(self.C[i], start=1):
            add(-k, -c)
        for ell, mat in enumerate(_taylor_mats(self, i, max(0, n_series))):
            add(ell, -mat)
        mats = [[Series(entries[p][q], n_series) for q in range(self.r)]
                for p in range(self.r)]
        return FormalConnection(mats, m=m, N=N)

    def _connection_series_infinity(self, N: int) -> FormalConnection:
        """Chart w = 1/z: dY/dw = -A(1/w)/w^2 Y, so the connection matrix
        in the chart is +A(1/w)/w^2."""
        m_inf = self.infinity_order()
        if m_inf == 0:
            raise ValueError("infinity is an ordinary point")
        n_series = N - m_inf
        entries = [[dict() for _ in range(self.r)] for _ in range(self.r)]

        def add(e, mat):
            if e >= n_series:
                return
            for p in range(self.r):
                for q in range(self.r):
                    v = mat[p, q]
                    if v != 0:
                        entries[p][q][e] = entries[p][q].get(e, 0.0) + v

        for t, row in zip(self.points, self.C):
            if t is None:
                continue
            for k, c in enumerate(row, start=1):
                # 1/(1/w - t)^k = w^k (1 - t w)^{-k}; overall factor 1/w^2
                binom = 1.0
                for ell in range(0, max(0, n_series + 2 - k)):
                    add(k - 2 + ell, c * binom * t ** ell)
                    binom = binom * (k + ell) / (ell + 1)
        for j, p in enumerate(self.poly):
            add(-j - 2, p)
        mats = [[Series(entries[p][q], n_series) for q in range(self.r)]
                for p in range(self.r)]
        return FormalConnection(mats, m=m_inf, N=N)

    def __repr__(self):
        return (f"RationalConnection(r={self.r}, n={self.n}, "
                f"orders={self.orders})")


def _taylor_mats(conn: RationalConnection, i: int, count: int):
    """Taylor matrices T_ell of A minus its own principal part at t_i:
    contributions of the other poles and the polynomial part."""
    t = conn.points[i]
    out = [np.zeros((conn.r, conn.r), dtype=complex) for _ in range(count)]
    for j, tj in enumerate(conn.points):
        if j == i or tj is None:
            continue
        delta = tj - t
        for k, c in enumerate(conn.C[j], start=1):
            # 1/(zeta - delta)^k = (-1)^k delta^{-k} sum C(k-1+l, l)(zeta/delta)^l
            base = (-1.0) ** k / delta ** k
            binom = 1.0
            for ell in range(count):
                out[ell] += c * base * binom / delta ** ell
                binom = binom * (k + ell) / (ell + 1)
    for jdeg, p in enumerate(conn.poly):
        for ell in range(min(count, jdeg + 1)):
            out[ell] += p * math.comb(jdeg, ell) * t ** (jdeg - ell)
    return out


# -- local exponents ---------------------------------------------------------------


def local_exponents(conn: RationalConnection, i: int, N: int,
                    cfg: RunConfig = DEFAULT):
    """Generalized exponents at point i: diagonalize the depth-N expansion
    of the connection matrix -A (NonGenericLeadingTerm propagates)."""
    fc = conn.connection_series(i, N)
    exps, _ = formal_diagonalize_generic(fc, cfg)
    return exps


def detect_exponents(conn: RationalConnection, cfg: RunConfig = DEFAULT,
                     depth_extra: int = 4) -> ExponentTuple:
    """Read the exponent tuple off the connection, labels sorted by a
    deterministic key (top coefficient first, then lower orders)."""
    a = []
    total = 0.0 + 0.0j
    for i in range(conn.n):
        m = conn.orders[i]
        exps = local_exponents(conn, i, m + depth_extra, cfg)
        rows = []
        for e in exps:
            rows.append(tuple(complex(e.coeff(k)) for k in range(-m, 0)))
        rows.sort(key=lambda row: tuple((round(c.real, 9), round(c.imag, 9))
                                        for c in row))
        a.append(tuple(rows))
        total += sum(row[-1] for row in rows)
    d = -round(total.real)
    if abs(total - round(total.real)) > 1e-6:
        raise ExponentMismatch(
            f"residues sum to {total}, not an integer: inconsistent input")
    return ExponentTuple(r=conn.r, d=d, n=conn.n, m=list(conn.orders), a=a)


def _match_labels(computed, prescribed, m, tol):
    """Permutation sigma with computed[sigma[j]] matching prescribed row j
    (prescribed rows list coefficients for k = -m..-1)."""
    r = len(computed)
    best, best_err = None, None
    for sigma in itertools.permutations(range(r)):
        err = 0.0
        for j in range(r):
            e = computed[sigma[j]]
            for k in range(-m, 0):
                err = max(err, abs(complex(e.coeff(k)) -
                                   complex(prescribed[j][k + m])))
        if best_err is None or err < best_err:
            best, best_err = sigma, err
    if best_err > tol:
        raise ExponentMismatch(
            f"computed exponents differ from prescribed by {best_err:.3e}")
    return best


# -- sector solutions ----------------------------------------------------------------


@dataclass
class SectorSolution:
    """Fundamental matrix seeded on a sector bisector, asymptotic to the
    formal basis f_j = exp(-int nu_j) e_j; solutions are columns."""
    point: int
    k: int
    rho: float
    order_used: int
    base_z: complex
    base_angle: float
    Y0: np.ndarray
    samples: list = field(default_factory=list)

    def det_nonzero(self, tol=1e-12):
        return abs(np.linalg.det(self.Y0)) > tol


@dataclass
class PointFrame:
    """Everything the monodromy assembly needs at one marked point."""
    i: int
    m: int
    rho: float
    tstar_angle: float
    table: SingularDirectionTable
    gamma: np.ndarray
    sectors: list          # SectorSolution per sector; None at m = 1
    regular_Y: np.ndarray  # frame value at t*; None at irregular points

    def seed_at_tstar(self):
        return self.sectors[0].Y0 if self.sectors is not None \
            else self.regular_Y


def _formal_basis_diag(nu_rows, m, rho, phi):
    """diag of f_j(rho e^{i phi}) with the log branch ln rho + i phi."""
    vals = []
    zeta = rho * cmath.exp(1j * phi)
    for row in nu_rows:
        q = 0.0 + 0.0j
        for k in range(-m, -1):
            a = complex(row[k + m])
            q += a * zeta ** (k + 1) / (k + 1)
        res = complex(row[-1])
        vals.append(cmath.exp(-q) * cmath.exp(-res * (math.log(rho)
                                                      + 1j * phi)))
    return np.array(vals, dtype=complex)


def _gauge_coefficient_mats(gauge, r):
    n_avail = min(entry.N for row in gauge for entry in row)
    mats = []
    for k in range(max(n_avail, 1)):
        mk = np.zeros((r, r), dtype=complex)
        for p in range(r):
            for q in range(r):
                mk[p, q] = complex(gauge[p][q].coeff(k))
        mats.append(mk)
    return mats


def _least_term(coeff_mats, rho):
    """(last included order, error estimate) for optimal truncation at
    radius rho: the error is the smallest smoothed term norm (max of two
    consecutive terms, which guards against accidental zeros)."""
    norms = [float(np.max(np.abs(mk))) * rho ** k
             for k, mk in enumerate(coeff_mats)]
    if len(norms) < 2:
        return 0, 0.0
    best_k, best_err = 1, None
    for k in range(1, len(norms)):
        nxt = norms[k + 1] if k + 1 < len(norms) else norms[k]
        err = max(norms[k], nxt)
        if best_err is None or err < best_err:
            best_k, best_err = k, err
    return best_k, best_err


def _eval_gauge(coeff_mats, z, order):
    out = np.zeros_like(coeff_mats[0])
    zp = 1.0 + 0.0j
    for k in range(min(order + 1, len(coeff_mats))):
        out += coeff_mats[k] * zp
        zp *= z
    return out


def irregular_point_frame(conn: RationalConnection, i: int,
                          nu: ExponentTuple, tol: float,
                          cfg: RunConfig = DEFAULT,
                          series_depth: int = 44) -> PointFrame:
    """Sector solutions at an irregular point by least-term matching on
    each sector bisector at a common radius."""
    m = conn.orders[i]
    if m < 2:
        raise ValueError("irregular frame needs m >= 2")
    r = conn.r
    t = conn.points[i]
    table = singular_directions(nu, i, cfg)
    fc = conn.connection_series(i, series_depth + m)
    exps, gauge = formal_diagonalize_generic(fc, cfg)
    sigma = _match_labels(exps, nu.a[i], m, 1e-5 * max(1.0, conn.scale()))
    gauge = [[gauge[p][sigma[j]] for j in range(r)] for p in range(r)]
    coeff_mats = _gauge_coefficient_mats(gauge, r)

    other = [p for p in conn.finite_poles() if abs(p - t) > 1e-12]
    gap = min((abs(p - t) for p in other), default=conn.scale() or 1.0)
    rho = 0.08 * gap          # keyhole standoff of 6 rho must clear others
    rho_min = 1e-4 * gap
    g0 = max(1.0, float(np.max(np.abs(coeff_mats[0]))))
    order_used, err = _least_term(coeff_mats, rho)
    while err > tol * g0 and rho > rho_min:
        rho *= 0.72
        order_used, err = _least_term(coeff_mats, rho)
    if err > tol * g0:
        raise MatchingRadiusNotFound(
            f"point {i}: least term {err:.2e} above tolerance {tol:.2e}; "
            f"raise the series depth or loosen the tolerance")

    gamma = np.array(formal_monodromy(nu).eigenvalues[i])
    s = table.count
    thetas = []
    for k in range(1, s + 1):
        lo = table.wrap if k == 1 else table.directions[k - 2]
        hi = table.directions[k - 1]
        thetas.append(0.5 * (lo + hi))
    sectors = []
    for k in range(1, s + 1):
        phi = thetas[k - 1]
        z = t + rho * cmath.exp(1j * phi)
        basis = _formal_basis_diag(nu.a[i], m, rho, phi)
        y0 = _eval_gauge(coeff_mats, z - t, order_used) @ np.diag(basis)
        sectors.append(SectorSolution(point=i, k=k, rho=rho,
                                      order_used=order_used, base_z=z,
                                      base_angle=phi, Y0=y0))
    return PointFrame(i=i, m=m, rho=rho, tstar_angle=table.tstar_angle,
                      table=table, gamma=gamma, sectors=sectors,
                      regular_Y=None)


def regular_point_frame(conn: RationalConnection, i: int, nu: ExponentTuple,
                        tol: float, cfg: RunConfig = DEFAULT,
                        max_order: int = 80) -> PointFrame:
    """Canonical Frobenius frame P(zeta) zeta^E at a non-resonant regular
    point; E = diag eigenvalues of Res A, matched to the prescribed
    residues through a_{j,-1} = -e_j."""
    r = conn.r
    t = conn.points[i]
    res_a = conn.C[i][0]
    targets = [-complex(nu.a[i][j][0]) for j in range(r)]
    evals, evecs = np.linalg.eig(res_a)
    order = []
    used = set()
    scale = max(1.0, float(np.max(np.abs(res_a))))
    for target in targets:
        best, best_err = None, None
        for idx in range(r):
            if idx in used:
                continue
            err = abs(evals[idx] - target)
            if best_err is None or err < best_err:
                best, best_err = idx, err
        if best_err > 1e-6 * scale:
            raise ExponentMismatch(
                f"point {i}: residue eigenvalue off target by {best_err:.2e}")
        used.add(best)
        order.append(best)
    e_diag = np.array([evals[j] for j in order])
    p0 = evecs[:, order]

    other = [p for p in conn.finite_poles() if abs(p - t) > 1e-12]
    gap = min((abs(p - t) for p in other), default=conn.scale() or 1.0)
    rho = 0.08 * gap
    taylor = _taylor_mats(conn, i, max_order + 1)
    pk = [p0]
    for k in range(1, max_order + 1):
        rhs = np.zeros((r, r), dtype=complex)
        for l in range(0, k):
            rhs += taylor[l] @ pk[k - 1 - l]
        rhs_t = np.linalg.solve(p0, rhs)
        qk = np.zeros((r, r), dtype=complex)
        for p in range(r):
            for q in range(r):
                qk[p, q] = rhs_t[p, q] / (k + e_diag[q] - e_diag[p])
        pk.append(p0 @ qk)
        if float(np.max(np.abs(pk[-1]))) * rho ** k < tol * 1e-2 and k >= 8:
            break
    while rho > 1e-4 * gap and \
            float(np.max(np.abs(pk[-1]))) * rho ** (len(pk) - 1) > tol * 1e-2:
        rho *= 0.7

    phi = -0.5 * math.pi
    zeta = rho * cmath.exp(1j * phi)
    p_val = np.zeros((r, r), dtype=complex)
    zp = 1.0 + 0.0j
    for mk in pk:
        p_val += mk * zp
        zp *= zeta
    y = p_val @ np.diag(np.exp(e_diag * (math.log(rho) + 1j * phi)))
    gamma = np.array(formal_monodromy(nu).eigenvalues[i])
    table = singular_directions(nu, i, cfg)   # empty at m = 1
    return PointFrame(i=i, m=1, rho=rho, tstar_angle=phi, table=table,
                      gamma=gamma, sectors=None, regular_Y=y)


# -- transports and assembly -------------------------------------------------------


def parallel_transport(conn: RationalConnection, path: Path, tol: float,
                       clearance: float = None) -> np.ndarray:
    """Flow matrix of dY = A(z) Y dz along the path."""
    if clearance is None:
        clearance = 1e-6 * max(1.0, conn.scale())
    return transport(conn.A, path, tol, poles=conn.finite_poles(),
                     clearance=clearance)


def liouville_residual(conn: RationalConnection, path: Path,
                       phi: np.ndarray) -> float:
    """|det phi - exp(int tr A dz)| along the path, with the trace
    integral in closed form (continuous log branches)."""
    total = 0.0 + 0.0j
    z0, z1 = path.start, path.end
    for i, t in enumerate(conn.points):
        if t is None:
            continue
        row = conn.C[i]
        tr1 = complex(np.trace(row[0]))
        if tr1 != 0:
            total += tr1 * log_increment(path, t)
        for k in range(2, len(row) + 1):
            trk = complex(np.trace(row[k - 1]))
            if trk != 0:
                total += trk * ((z1 - t) ** (1 - k) -
                                (z0 - t) ** (1 - k)) / (1 - k)
    for j, p in enumerate(conn.poly):
        trp = complex(np.trace(p))
        if trp != 0:
            total += trp * (z1 ** (j + 1) - z0 ** (j + 1)) / (j + 1)
    return abs(np.linalg.det(phi) - cmath.exp(total))


def keyhole_path(b: complex, t: complex, rho: float, phi_star: float,
                 standoff: float = 6.0) -> Path:
    """b -> standoff circle (approached from the b side) -> arc to the t*
    ray -> radially in to t* = t + rho e^{i phi*}."""
    a0 = cmath.phase(b - t)
    delta = (phi_star - a0 + math.pi) % TWO_PI - math.pi
    segments = [Line(b, t + standoff * rho * cmath.exp(1j * a0))]
    if abs(delta) > 1e-12:
        segments.append(Arc(t, standoff * rho, a0, a0 + delta))
    segments.append(Line(t + standoff * rho * cmath.exp(1j * phi_star),
                         t + rho * cmath.exp(1j * phi_star)))
    return Path(segments)


def _stokes_for_point(conn, frame: PointFrame, tol, ode_tol):
    """Transition matrices between consecutive sector solutions; the last
    ray wraps to sector 1 shifted by 2 pi and the formal monodromy."""
    i, t = frame.i, conn.points[frame.i]
    s = frame.table.count
    r = conn.r
    poles = conn.finite_poles()
    stokes = []
    off_max = 0.0
    for k in range(1, s + 1):
        cur = frame.sectors[k - 1]
        if k < s:
            nxt = frame.sectors[k].Y0
            phi_to = frame.sectors[k].base_angle
        else:
            nxt = frame.sectors[0].Y0 @ np.diag(frame.gamma)
            phi_to = frame.sectors[0].base_angle + TWO_PI
        arc = Path([Arc(t, frame.rho, cur.base_angle, phi_to)])
        flow = transport(conn.A, arc, ode_tol, poles=poles,
                         clearance=0.4 * frame.rho)
        raw = np.linalg.solve(nxt, flow @ cur.Y0)
        pattern = {(j2, j1) for (j1, j2) in frame.table.pair_sets[k - 1]}
        st = np.eye(r, dtype=complex)
        for p in range(r):
            for q in range(r):
                val = raw[p, q]
                if (p, q) in pattern:
                    st[p, q] = val
                    continue
                err = abs(val - (1.0 if p == q else 0.0))
                off_max = max(off_max, err)
                if err > 10 * tol:
                    raise SupportViolation(
                        f"point {i}, ray {k}: entry {(p, q)} = {val:.3e} "
                        f"off the Stokes pattern (tol {tol:.1e})")
        stokes.append(st)
    return stokes, off_max


def full_monodromy_data(conn: RationalConnection, nu: ExponentTuple = None,
                        paths=None, tol: float = 1e-9,
                        cfg: RunConfig = DEFAULT, checks: bool = True):
    """Assemble the generalized monodromy data of the connection.

    Returns (MonodromyData, report).  The report carries the relation
    residual, per-point two-route Top errors (product formula against a
    direct loop transport), the largest off-pattern Stokes entry, the
    Liouville determinant residuals of the link transports and the
    matching radii.  Auto-generated paths need the declared points
    finite and sorted by ascending real part (standard keyhole system
    from a base point below the configuration).
    """
    if any(t is None for t in conn.points):
        raise ValueError("monodromy assembly needs finite points")
    if nu is None:
        nu = detect_exponents(conn, cfg)
    cls = classify(nu, cfg)
    if not cls.generic:
        raise ExponentMismatch("exponents are not generic")
    if cls.resonant:
        raise ExponentMismatch("exponents are resonant")
    if not cls.simple:
        raise ExponentMismatch("exponents are not simple")
    reals = [t.real for t in conn.points]
    if paths is None and reals != sorted(reals):
        raise ValueError("auto paths require points sorted by real part")

    ode_tol = max(1e-13, tol * 1e-3)
    frames = []
    for i in range(conn.n):
        if conn.orders[i] >= 2:
            frames.append(irregular_point_frame(conn, i, nu, tol, cfg))
        else:
            frames.append(regular_point_frame(conn, i, nu, tol, cfg))

    if conn.base is not None:
        b = complex(conn.base)
    else:
        lo = min(t.imag for t in conn.points)
        span = conn.scale()
        b = complex(sum(t.real for t in conn.points) / conn.n,
                    lo - 0.9 * max(span, 1.0))

    poles = conn.finite_poles()
    report = {"rho": {}, "top_two_route": {}, "liouville": {}}
    links = []
    for i, frame in enumerate(frames):
        t = conn.points[i]
        seed = frame.seed_at_tstar()
        lpath = paths[i] if paths is not None else \
            keyhole_path(b, t, frame.rho, frame.tstar_angle)
        flow = transport(conn.A, lpath, ode_tol, poles=poles,
                         clearance=0.4 * frame.rho)
        links.append(np.linalg.solve(seed, flow))
        report["rho"][i] = frame.rho
        if checks:
            report["liouville"][i] = liouville_residual(conn, lpath, flow)

    patterns, stokes, gammas = [], [], []
    off_sup = 0.0
    for i, frame in enumerate(frames):
        gammas.append(frame.gamma)
        t = conn.points[i]
        if frame.sectors is None:
            patterns.append([])
            stokes.append([])
            if checks:
                loop = Path.circle(t, frame.rho, frame.tstar_angle)
                flow = transport(conn.A, loop, ode_tol, poles=poles,
                                 clearance=0.4 * frame.rho)
                top_loop = np.linalg.solve(frame.regular_Y,
                                           flow @ frame.regular_Y)
                report["top_two_route"][i] = float(np.max(np.abs(
                    top_loop - np.diag(frame.gamma))))
            continue
        patterns.append(list(frame.table.pair_sets))
        st_row, off = _stokes_for_point(conn, frame, tol, ode_tol)
        off_sup = max(off_sup, off)
        stokes.append(st_row)
        if checks:
            loop = Path.circle(t, frame.rho, frame.sectors[0].base_angle)
            flow = transport(conn.A, loop, ode_tol, poles=poles,
                             clearance=0.4 * frame.rho)
            y1 = frame.sectors[0].Y0
            top_loop = np.linalg.solve(y1, flow @ y1)
            top_formula = np.diag(frame.gamma)
            for st in reversed(st_row):
                top_formula = top_formula @ st
            report["top_two_route"][i] = float(np.max(np.abs(
                top_loop - top_formula)))

    data = MonodromyData(r=conn.r, patterns=patterns, gamma=gammas,
                         stokes=stokes, links=links, A=[], B=[])
    _, resid = relation_residual(data)
    report["relation_residual"] = resid
    report["stokes_off_pattern"] = off_sup
    return data, report
