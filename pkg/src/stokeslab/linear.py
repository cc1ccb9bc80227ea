"""Small dense linear algebra over an exact or floating scalar field.

Matrices are lists of lists of scalars (GaussianRational or complex).
Sizes here are tiny (r <= 4, or coefficient systems of a few hundred
unknowns for the depth-matching solve), so plain Gaussian elimination
with exact pivoting is the right tool; numpy handles the float-only
paths elsewhere.
"""

from fractions import Fraction

import numpy as np

from .gaussian import (GaussianRational, QQi, as_scalar, gauss_sqrt, is_exact,
                       scalar_is_zero, to_complex)
from .errors import ExactEigenvaluesNotInField


def zeros(n, m):
    return [[QQi(0) for _ in range(m)] for _ in range(n)]


def identity(n, one=None):
    one = QQi(1) if one is None else one
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = one
    return out


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[None] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            s = a[i][0] * b[0][j]
            for p in range(1, k):
                s = s + a[i][p] * b[p][j]
            out[i][j] = s
    return out


def mat_add(a, b):
    return [[a[i][j] + b[i][j] for j in range(len(a[0]))] for i in range(len(a))]


def mat_scale(a, c):
    return [[c * a[i][j] for j in range(len(a[0]))] for i in range(len(a))]


def _pivot_weight(x):
    if isinstance(x, GaussianRational):
        return float(x.norm2())
    return abs(x) ** 2


def solve(a, b, tol: float = 0.0):
    """Solve a x = b (b a matrix of columns).  Returns None if singular."""
    n = len(a)
    m = len(b[0])
    aug = [[a[i][j] for j in range(n)] + [b[i][j] for j in range(m)]
           for i in range(n)]
    for col in range(n):
        piv, best = None, tol
        for row in range(col, n):
            w = _pivot_weight(aug[row][col])
            if w > best:
                piv, best = row, w
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col] if not isinstance(aug[col][col], GaussianRational) \
            else QQi(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for row in range(n):
            if row != col and not scalar_is_zero(aug[row][col]):
                f = aug[row][col]
                aug[row] = [aug[row][j] - f * aug[col][j] for j in range(n + m)]
    return [[aug[i][n + j] for j in range(m)] for i in range(n)]


def inverse(a, tol: float = 0.0):
    one = QQi(1) if is_exact(a[0][0]) else 1.0 + 0j
    return solve(a, identity(len(a), one), tol)


def det(a):
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if n == 3:
        return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def nullspace(a, tol: float = 0.0):
    """Basis of the right nullspace of a (rows x cols), row reduction."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    mat = [list(r) for r in a]
    pivots = []
    r = 0
    for c in range(cols):
        piv, best = None, tol
        for row in range(r, rows):
            w = _pivot_weight(mat[row][c])
            if w > best:
                piv, best = row, w
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = QQi(1) / mat[r][c] if isinstance(mat[r][c], GaussianRational) \
            else 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for row in range(rows):
            if row != r and not scalar_is_zero(mat[row][c]):
                f = mat[row][c]
                mat[row] = [mat[row][j] - f * mat[r][j] for j in range(cols)]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    zero = QQi(0) if (rows and is_exact(a[0][0])) else 0j
    one = QQi(1) if (rows and is_exact(a[0][0])) else 1 + 0j
    basis = []
    for fc in free:
        v = [zero] * cols
        v[fc] = one
        for prow, pc in enumerate(pivots):
            v[pc] = -mat[prow][fc]
        basis.append(v)
    return basis


# -- exact eigenvalues (r <= 3) ---------------------------------------------

def charpoly(a):
    """Characteristic polynomial coefficients [c_0, ..., c_{n-1}, 1] of a,
    p(t) = det(tI - a), lowest degree first."""
    n = len(a)
    if n == 1:
        return [-a[0][0], QQi(1) if is_exact(a[0][0]) else 1 + 0j]
    if n == 2:
        tr = a[0][0] + a[1][1]
        return [det(a), -tr, QQi(1) if is_exact(a[0][0]) else 1 + 0j]
    if n == 3:
        tr = a[0][0] + a[1][1] + a[2][2]
        m = (a[0][0] * a[1][1] - a[0][1] * a[1][0]
             + a[0][0] * a[2][2] - a[0][2] * a[2][0]
             + a[1][1] * a[2][2] - a[1][2] * a[2][1])
        one = QQi(1) if is_exact(a[0][0]) else 1 + 0j
        return [-det(a), m, -tr, one]
    raise ValueError("charpoly implemented for n <= 3")


def _poly_eval(coeffs, x):
    out = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        out = out * x + c
    return out


def _rationalize(x: complex, max_den: int):
    return QQi(Fraction(x.real).limit_denominator(max_den),
               Fraction(x.imag).limit_denominator(max_den))


def exact_eigenvalues(a):
    """Eigenvalues of an exact matrix (n <= 3) as Gaussian rationals.

    Raises ExactEigenvaluesNotInField when the spectrum leaves Q(i).
    """
    n = len(a)
    a = [[as_scalar(x) for x in row] for row in a]
    if n == 1:
        return [a[0][0]]
    if n == 2:
        c0, c1, _ = charpoly(a)
        disc = c1 * c1 - 4 * c0
        root = gauss_sqrt(disc)
        if root is None:
            raise ExactEigenvaluesNotInField(
                "discriminant has no Gaussian-rational square root")
        return [(-c1 + root) / 2, (-c1 - root) / 2]
    if n == 3:
        coeffs = charpoly(a)
        lam = _find_rational_root(coeffs, a)
        # deflate: p / (t - lam)
        c3, c2, c1 = coeffs[3], coeffs[2], coeffs[1]
        b2 = c3
        b1 = c2 + lam * b2
        b0 = c1 + lam * b1
        disc = b1 * b1 - 4 * b2 * b0
        root = gauss_sqrt(disc)
        if root is None:
            raise ExactEigenvaluesNotInField(
                "deflated quadratic is irreducible over Q(i)")
        return [lam, (-b1 + root) / (2 * b2), (-b1 - root) / (2 * b2)]
    raise ValueError("exact_eigenvalues implemented for n <= 3")


def _find_rational_root(coeffs, a):
    approx = np.linalg.eigvals(np.array(
        [[to_complex(x) for x in row] for row in a], dtype=complex))
    for max_den in (10, 10**3, 10**6, 10**9, 10**12):
        for ev in approx:
            cand = _rationalize(complex(ev), max_den)
            if _poly_eval(coeffs, cand).is_zero():
                return cand
    raise ExactEigenvaluesNotInField(
        "no Gaussian-rational root of the characteristic polynomial found")


def exact_eigenvectors(a, eigenvalues):
    """One exact eigenvector per (distinct) eigenvalue; columns of output."""
    n = len(a)
    cols = []
    for lam in eigenvalues:
        shifted = [[a[i][j] - (lam if i == j else QQi(0)) for j in range(n)]
                   for i in range(n)]
        basis = nullspace(shifted)
        if not basis:
            raise ExactEigenvaluesNotInField("eigenvector solve failed")
        cols.append(basis[0])
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def to_numpy(a) -> np.ndarray:
    return np.array([[to_complex(x) for x in row] for row in a], dtype=complex)
