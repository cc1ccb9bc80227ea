"""Generalized exponent tuples and their predicates.

An ExponentTuple is a point of the parameter space of local exponents:
for each marked point i (pole order m_i) and each level j = 0..r-1 it
stores the coefficients a^(i)_{j,k} of the polar series

    nu^(i)_j = (a_{j,-m_i} z^-m_i + ... + a_{j,-1} z^-1) dz,

subject to the Fuchs relation d + sum of residues = 0.  Predicates:
generic (distinct top terms per point), resonant (integer residue
difference at a first-order pole), reducible (some proper sub-multiset
of residues sums to an integer), simple (all singular directions have
multiplicity one).
"""

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .config import DEFAULT, RunConfig
from .errors import ReducibilitySearchTooLarge
from .gaussian import GaussianRational, as_scalar, is_exact, to_complex

TWO_PI = 2.0 * math.pi


class ExponentTuple:
    """nu = (nu^(i)_j); a[i][j] lists coefficients for k = -m_i .. -1."""

    __slots__ = ("r", "d", "n", "m", "a")

    def __init__(self, r, d, n, m, a):
        if len(m) != n or len(a) != n:
            raise ValueError("m and a must have one entry per point")
        for i in range(n):
            if m[i] < 1:
                raise ValueError("pole orders must be >= 1")
            if len(a[i]) != r or any(len(row) != m[i] for row in a[i]):
                raise ValueError(f"a[{i}] must be r x m_i")
        object.__setattr__(self, "r", int(r))
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "m", tuple(int(x) for x in m))
        object.__setattr__(self, "a", tuple(
            tuple(tuple(as_scalar(c) for c in row) for row in a[i])
            for i in range(n)))

    def __setattr__(self, *args):
        raise AttributeError("ExponentTuple is immutable")

    def coeff(self, i, j, k):
        """a^(i)_{j,k} for -m_i <= k <= -1."""
        return self.a[i][j][k + self.m[i]]

    def residue(self, i, j):
        return self.coeff(i, j, -1)

    def top(self, i, j):
        return self.coeff(i, j, -self.m[i])

    def residues(self, i):
        return [self.residue(i, j) for j in range(self.r)]

    def tops(self, i):
        return [self.top(i, j) for j in range(self.r)]

    def is_exact(self):
        return all(is_exact(c) for pt in self.a for row in pt for c in row)

    def nu_series(self, i, j, N):
        """nu^(i)_j as a TruncatedLaurentSeries (dz-coefficient)."""
        from .series import Series
        return Series({k: self.coeff(i, j, k)
                       for k in range(-self.m[i], 0)}, N)

    def __eq__(self, other):
        if not isinstance(other, ExponentTuple):
            return NotImplemented
        return (self.r, self.d, self.n, self.m, self.a) == \
               (other.r, other.d, other.n, other.m, other.a)

    def __repr__(self):
        return (f"ExponentTuple(r={self.r}, d={self.d}, n={self.n}, "
                f"m={list(self.m)})")


# -- Fuchs relation -----------------------------------------------------------

def fuchs_residue_sum(nu: ExponentTuple):
    """d + sum of all residues; zero iff nu is a valid parameter point."""
    total = as_scalar(nu.d)
    for i in range(nu.n):
        for j in range(nu.r):
            total = total + nu.residue(i, j)
    return total


def satisfies_fuchs(nu: ExponentTuple, cfg: RunConfig = DEFAULT) -> bool:
    s = fuchs_residue_sum(nu)
    if isinstance(s, GaussianRational):
        return s.is_zero()
    return abs(s) <= cfg.float_eq


# -- integrality helpers ------------------------------------------------------

def _is_integer(x, tol: float) -> bool:
    if isinstance(x, GaussianRational):
        return x.im == 0 and x.re.denominator == 1
    z = complex(x)
    return abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


def _equal(x, y, tol: float) -> bool:
    if isinstance(x, GaussianRational) and isinstance(y, GaussianRational):
        return x == y
    return abs(to_complex(x) - to_complex(y)) <= tol


# -- classification -----------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    generic: bool
    resonant: bool
    reducible: bool
    simple: bool

    def as_dict(self):
        return {"generic": self.generic, "resonant": self.resonant,
                "reducible": self.reducible, "simple": self.simple}


def is_generic(nu: ExponentTuple, cfg: RunConfig = DEFAULT) -> bool:
    """Top coefficients pairwise distinct at every point (Def applied
    verbatim at k = -m_i; for m_i = 1 the top term is the residue)."""
    for i in range(nu.n):
        tops = nu.tops(i)
        for j1 in range(nu.r):
            for j2 in range(j1 + 1, nu.r):
                if _equal(tops[j1], tops[j2], cfg.float_eq):
                    return False
    return True


def is_resonant(nu: ExponentTuple, cfg: RunConfig = DEFAULT) -> bool:
    for i in range(nu.n):
        if nu.m[i] != 1:
            continue
        res = nu.residues(i)
        for j1 in range(nu.r):
            for j2 in range(nu.r):
                if j1 != j2 and _is_integer(res[j1] - res[j2], cfg.integrality):
                    return True
    return False


def is_reducible(nu: ExponentTuple, cfg: RunConfig = DEFAULT) -> bool:
    """Exhaustive search of the integer-sum condition over all choices of
    h residues per point, 1 <= h <= r-1 (a single h for all points)."""
    r, n = nu.r, nu.n
    for h in range(1, r):
        count = math.comb(r, h) ** n
        if count > cfg.reducibility_bound:
            raise ReducibilitySearchTooLarge(
                f"h={h}: {count} choices exceed bound {cfg.reducibility_bound}")
        per_point = [
            [sum_scalars([nu.residue(i, j) for j in combo])
             for combo in itertools.combinations(range(r), h)]
            for i in range(n)
        ]
        for pick in itertools.product(*per_point):
            if _is_integer(sum_scalars(pick), cfg.integrality):
                return True
    return False


def sum_scalars(xs):
    total = as_scalar(0)
    for x in xs:
        total = total + x
    return total


def classify(nu: ExponentTuple, cfg: RunConfig = DEFAULT) -> Classification:
    generic = is_generic(nu, cfg)
    resonant = is_resonant(nu, cfg)
    reducible = is_reducible(nu, cfg)
    if generic:
        from .stokes_geometry import is_simple
        simple = is_simple(nu, cfg)
    else:
        simple = False
    return Classification(generic=generic, resonant=resonant,
                          reducible=reducible, simple=simple)


# -- (top, mid, res) decomposition ---------------------------------------------

@dataclass(frozen=True)
class NuDecomposition:
    """nu_top: {(i,j): a_{j,-m_i}} for m_i >= 2; nu_mid: {(i,j): tuple of
    a_{j,k}, -m_i < k < -1}; nu_res: {(i,j): a_{j,-1}}."""
    top: dict
    mid: dict
    res: dict
    r: int
    d: int
    m: tuple


def decompose(nu: ExponentTuple) -> NuDecomposition:
    top, mid, res = {}, {}, {}
    for i in range(nu.n):
        for j in range(nu.r):
            if nu.m[i] >= 2:
                top[(i, j)] = nu.top(i, j)
            mid[(i, j)] = tuple(nu.coeff(i, j, k)
                                for k in range(-nu.m[i] + 1, -1))
            res[(i, j)] = nu.residue(i, j)
    return NuDecomposition(top=top, mid=mid, res=res,
                           r=nu.r, d=nu.d, m=nu.m)


def recompose(dec: NuDecomposition) -> ExponentTuple:
    n = len(dec.m)
    a = []
    for i in range(n):
        rows = []
        for j in range(dec.r):
            coeffs = []
            if dec.m[i] >= 2:
                coeffs.append(dec.top[(i, j)])
            coeffs.extend(dec.mid[(i, j)])
            coeffs.append(dec.res[(i, j)])
            rows.append(tuple(coeffs))
        a.append(tuple(rows))
    return ExponentTuple(r=dec.r, d=dec.d, n=n, m=dec.m, a=a)


# -- formal monodromy ---------------------------------------------------------

@dataclass(frozen=True)
class FormalMonodromyTuple:
    """Per point: the r diagonal eigenvalues of gamma-hat_i in basis-label
    order j = 0..r-1."""
    eigenvalues: tuple   # tuple over i of tuple over j of complex

    def matrix(self, i):
        import numpy as np
        return np.diag(np.array(self.eigenvalues[i], dtype=complex))


def formal_monodromy(res) -> FormalMonodromyTuple:
    """Map residues to gamma-hat eigenvalues exp(-2 pi i a_{j,-1}).

    Accepts an ExponentTuple or the res dict of a NuDecomposition.  The
    sign matches continuation of the flat section exp(-int nu_j) once
    counterclockwise around the point.
    """
    if isinstance(res, ExponentTuple):
        table = [[res.residue(i, j) for j in range(res.r)]
                 for i in range(res.n)]
    elif isinstance(res, NuDecomposition):
        n = len(res.m)
        table = [[res.res[(i, j)] for j in range(res.r)] for i in range(n)]
    else:  # {(i,j): value}
        n = 1 + max(i for i, _ in res)
        r = 1 + max(j for _, j in res)
        table = [[res[(i, j)] for j in range(r)] for i in range(n)]
    eigs = tuple(
        tuple(cmath.exp(-2j * math.pi * to_complex(x)) for x in row)
        for row in table)
    return FormalMonodromyTuple(eigenvalues=eigs)


# -- convenience constructors ---------------------------------------------------

def fuchsian_tuple(residue_rows, d=None):
    """ExponentTuple with all m_i = 1 from rows of residues; d from Fuchs
    when omitted (must then be integral)."""
    n = len(residue_rows)
    r = len(residue_rows[0])
    total = sum_scalars([x for row in residue_rows for x in row])
    if d is None:
        if isinstance(total, GaussianRational):
            if total.im != 0 or total.re.denominator != 1:
                raise ValueError("residues do not sum to an integer")
            d = -int(total.re)
        else:
            d = -round(total.real)
    a = [[(x,) for x in row] for row in residue_rows]
    return ExponentTuple(r=r, d=d, n=n, m=[1] * n, a=a)
