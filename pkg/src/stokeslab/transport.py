"""Analytic continuation of fundamental solutions along paths in C.

Paths are lists of segments (straight lines and circular arcs).  The
flow matrix Phi of the linear system dY = A(z) Y dz is integrated with
DOP853 segment by segment; the step size is capped by the distance to
the nearest pole.  With fundamental matrices holding solutions as
columns, the flow matrices compose anti-homomorphically in the path
order, matching the representation convention used by the monodromy
relation.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import PathTooClose, ToleranceNotMet

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Line:
    z0: complex
    z1: complex

    def at(self, s: float) -> complex:
        return self.z0 + s * (self.z1 - self.z0)

    def velocity(self, s: float) -> complex:
        return self.z1 - self.z0

    def length(self) -> float:
        return abs(self.z1 - self.z0)

    def min_distance(self, p: complex) -> float:
        d = self.z1 - self.z0
        L2 = (d * d.conjugate()).real
        if L2 == 0.0:
            return abs(self.z0 - p)
        t = ((p - self.z0) * d.conjugate()).real / L2
        t = min(1.0, max(0.0, t))
        return abs(self.z0 + t * d - p)


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    a0: float
    a1: float   # may differ from a0 by more than 2 pi; sign = orientation

    def at(self, s: float) -> complex:
        ang = self.a0 + s * (self.a1 - self.a0)
        return self.center + self.radius * cmath.exp(1j * ang)

    def velocity(self, s: float) -> complex:
        ang = self.a0 + s * (self.a1 - self.a0)
        return 1j * self.radius * (self.a1 - self.a0) * cmath.exp(1j * ang)

    def length(self) -> float:
        return self.radius * abs(self.a1 - self.a0)

    def min_distance(self, p: complex) -> float:
        rel = p - self.center
        rho = abs(rel)
        lo, hi = min(self.a0, self.a1), max(self.a0, self.a1)
        if hi - lo >= TWO_PI or _angle_in(cmath.phase(rel), lo, hi):
            return abs(rho - self.radius)
        return min(abs(self.at(0.0) - p), abs(self.at(1.0) - p))


def _angle_in(phi: float, lo: float, hi: float) -> bool:
    # is phi congruent mod 2 pi to a value in [lo, hi]?
    k0 = math.floor((lo - phi) / TWO_PI)
    for k in (k0, k0 + 1, k0 + 2):
        if lo <= phi + k * TWO_PI <= hi:
            return True
    return False


class Path:
    """Piecewise path; segments must be contiguous."""

    def __init__(self, segments):
        self.segments = list(segments)
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.at(1.0) - b.at(0.0)) > 1e-9 * max(1.0, abs(a.at(1.0))):
                raise ValueError("path segments are not contiguous")

    @property
    def start(self):
        return self.segments[0].at(0.0)

    @property
    def end(self):
        return self.segments[-1].at(1.0)

    def length(self):
        return sum(s.length() for s in self.segments)

    def min_distance(self, p: complex) -> float:
        return min(s.min_distance(p) for s in self.segments)

    def reversed(self):
        out = []
        for seg in reversed(self.segments):
            if isinstance(seg, Line):
                out.append(Line(seg.z1, seg.z0))
            else:
                out.append(Arc(seg.center, seg.radius, seg.a1, seg.a0))
        return Path(out)

    @classmethod
    def line(cls, z0, z1):
        return cls([Line(z0, z1)])

    @classmethod
    def circle(cls, center, radius, start_angle, turns=1.0):
        return cls([Arc(center, radius, start_angle,
                        start_angle + TWO_PI * turns)])

    @classmethod
    def polyline(cls, points):
        return cls([Line(a, b) for a, b in zip(points, points[1:])])


def transport(a_eval, path: Path, tol: float, poles=(),
              clearance: float = 0.0, rhs_scale: float = 1.0) -> np.ndarray:
    """Flow matrix Phi of dY = A(z) Y dz along the path (Y(start) = I).

    a_eval(z) returns the r x r system matrix.  Raises PathTooClose when
    the path violates the clearance around a pole, ToleranceNotMet when
    the integrator gives up.
    """
    if clearance > 0.0:
        for p in poles:
            d = path.min_distance(p)
            if d < clearance:
                raise PathTooClose(
                    f"path approaches pole {p} at distance {d:.3e} "
                    f"< clearance {clearance:.3e}")
    probe = a_eval(path.start)
    r = probe.shape[0]
    phi = np.eye(r, dtype=complex)
    for seg in path.segments:
        pole_dist = min((seg.min_distance(p) for p in poles), default=None)
        max_step = 0.2
        if pole_dist is not None and seg.length() > 0:
            # param-space cap: quarter of the pole distance per step
            max_step = max(1e-6, 0.25 * pole_dist / max(seg.length(), 1e-12))
            max_step = min(0.2, max_step)

        def rhs(s, y, seg=seg):
            z = seg.at(s)
            dz = seg.velocity(s)
            mat = a_eval(z) * (dz * rhs_scale)
            return (mat @ y.reshape(r, r)).ravel()

        sol = solve_ivp(rhs, (0.0, 1.0), phi.ravel(), method="DOP853",
                        rtol=tol, atol=tol, max_step=max_step,
                        dense_output=False)
        if not sol.success:
            raise ToleranceNotMet(
                f"integration failed on segment {seg}: {sol.message}")
        phi = sol.y[:, -1].reshape(r, r)
    return phi


def log_increment(path: Path, pole: complex, pieces_per_segment: int = 64):
    """Continuous increment of log(z - pole) along the path (winding
    tracked by short-piece principal logs)."""
    total = 0.0 + 0.0j
    for seg in path.segments:
        n = pieces_per_segment
        if isinstance(seg, Arc):
            n = max(n, int(8 * abs(seg.a1 - seg.a0)) + 1)
        prev = seg.at(0.0) - pole
        for j in range(1, n + 1):
            cur = seg.at(j / n) - pole
            total += cmath.log(cur / prev)
            prev = cur
    return total
