"""Singular directions, multiplicity sets and sectors at irregular points.

At a point with pole order m >= 2, a ray of argument d is singular for
the ordered pair (j1, j2) exactly when exp(int(nu_j1 - nu_j2)) has
maximal descent along it, i.e. when (m-1) d = arg(a_{j1,-m} - a_{j2,-m})
mod 2 pi.  Each ordered pair with nonzero top difference contributes
m-1 rays, so the total multiplicity count at the point is
(m-1) r (r-1).  Everything here depends only on the top coefficients.
"""

import cmath
import math
from dataclasses import dataclass

from .config import DEFAULT, RunConfig
from .errors import NonGenericAtPoint
from .exponents import ExponentTuple
from .gaussian import GaussianRational, to_complex

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SingularDirectionTable:
    """One point's direction data.

    directions: sorted d_1 < ... < d_s in [0, 2 pi).
    pair_sets[k]: the set J(d_{k+1}, i) of ordered pairs (j1, j2).
    wrap: d_0 = d_s - 2 pi.
    tstar_angle: placement of t*_i, the midpoint of the wrap gap.
    """
    point: int
    m: int
    r: int
    directions: tuple
    pair_sets: tuple

    @property
    def count(self) -> int:
        return len(self.directions)

    @property
    def multiplicity_total(self) -> int:
        return sum(len(s) for s in self.pair_sets)

    @property
    def wrap(self) -> float:
        if not self.directions:
            raise ValueError("empty direction table has no wrap value")
        return self.directions[-1] - TWO_PI

    @property
    def tstar_angle(self) -> float:
        if not self.directions:
            return -0.5 * math.pi
        return 0.5 * (self.wrap + self.directions[0])

    def multiplicities(self):
        return [len(s) for s in self.pair_sets]


@dataclass(frozen=True)
class Sector:
    """Open angular sector (lo, hi) at radius eps around point i."""
    point: int
    k: int          # 1-based sector index
    lo: float
    hi: float
    radius: float

    @property
    def bisector(self) -> float:
        return 0.5 * (self.lo + self.hi)


def _ray_classes_exact(deltas):
    """Group pair-indices by exact ray equality: same ray iff
    Delta1 * conj(Delta2) is real positive (Gaussian-rational test)."""
    classes = []
    for idx, d in deltas:
        placed = False
        for cls in classes:
            ref = cls[0][1]
            prod = d * ref.conjugate()
            if prod.im == 0 and prod.re > 0:
                cls.append((idx, d))
                placed = True
                break
        if not placed:
            classes.append([(idx, d)])
    return classes


def _ray_classes_float(deltas, tol):
    classes = []
    for idx, d in deltas:
        ang = cmath.phase(complex(d)) % TWO_PI
        placed = False
        for cls in classes:
            ref = cls["angle"]
            diff = abs((ang - ref + math.pi) % TWO_PI - math.pi)
            if diff < tol:
                cls["members"].append((idx, d))
                placed = True
                break
        if not placed:
            classes.append({"angle": ang, "members": [(idx, d)]})
    return [c["members"] for c in classes]


def singular_directions(nu: ExponentTuple, i: int,
                        cfg: RunConfig = DEFAULT) -> SingularDirectionTable:
    """Direction table at point i.  Empty for m_i = 1."""
    r, m = nu.r, nu.m[i]
    if m == 1:
        return SingularDirectionTable(point=i, m=m, r=r,
                                      directions=(), pair_sets=())
    tops = nu.tops(i)
    deltas = []
    exact = all(isinstance(t, GaussianRational) for t in tops)
    for j1 in range(r):
        for j2 in range(r):
            if j1 == j2:
                continue
            delta = tops[j1] - tops[j2]
            if (delta.is_zero() if isinstance(delta, GaussianRational)
                    else abs(delta) <= cfg.float_eq):
                raise NonGenericAtPoint(
                    f"point {i}: equal top terms for levels {j1}, {j2}")
            deltas.append(((j1, j2), delta))
    if exact:
        classes = _ray_classes_exact(deltas)
    else:
        classes = _ray_classes_float(deltas, cfg.direction_merge)

    entries = []  # (direction, frozenset of pairs)
    for members in classes:
        pairs = frozenset(idx for idx, _ in members)
        theta = cmath.phase(to_complex(members[0][1]))
        for ell in range(m - 1):
            d = (theta + TWO_PI * ell) / (m - 1) % TWO_PI
            entries.append((d, pairs))
    entries.sort(key=lambda t: t[0])
    # merge identical float directions coming from different ray classes
    merged = []
    for d, pairs in entries:
        if merged and abs(d - merged[-1][0]) < cfg.direction_merge:
            merged[-1] = (merged[-1][0], merged[-1][1] | pairs)
        else:
            merged.append((d, pairs))
    # wraparound merge (directions near 0 and near 2 pi)
    if len(merged) > 1 and abs(merged[0][0] + TWO_PI - merged[-1][0]) \
            < cfg.direction_merge:
        merged[0] = (merged[0][0], merged[0][1] | merged[-1][1])
        merged.pop()
    return SingularDirectionTable(
        point=i, m=m, r=r,
        directions=tuple(d for d, _ in merged),
        pair_sets=tuple(p for _, p in merged))


def direction_tables(nu: ExponentTuple, cfg: RunConfig = DEFAULT):
    return [singular_directions(nu, i, cfg) for i in range(nu.n)]


def sectors(table: SingularDirectionTable, eps: float):
    """The s_i open sectors of eq-style tiling; sector 1 starts at the wrap
    value d_0 = d_s - 2 pi, so its closure contains the t* angle."""
    if not table.directions:
        raise ValueError("no sectors at a point without singular directions")
    ds = table.directions
    out = []
    for k in range(1, len(ds) + 1):
        lo = table.wrap if k == 1 else ds[k - 2]
        hi = ds[k - 1]
        out.append(Sector(point=table.point, k=k, lo=lo, hi=hi, radius=eps))
    return out


def is_simple(nu: ExponentTuple, cfg: RunConfig = DEFAULT) -> bool:
    """True iff every singular direction has multiplicity one (vacuous at
    points with m_i = 1)."""
    for i in range(nu.n):
        if nu.m[i] == 1:
            continue
        table = singular_directions(nu, i, cfg)
        if any(len(s) != 1 for s in table.pair_sets):
            return False
    return True
