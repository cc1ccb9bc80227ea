"""Exact complex rationals Q(i) and scalar helpers.

Series and matrix code in this package is generic over the coefficient
field: scalars are either GaussianRational (exact mode) or Python
complex (float mode).  Mixing the two coerces to complex.
"""

import math
from fractions import Fraction


class GaussianRational:
    """a + b*i with a, b rational; immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussianRational is immutable")

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.to_complex() + other
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.to_complex() - other
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - self.to_complex()
        return o - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.to_complex() * other
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.to_complex() / other
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational((self.re * o.re + self.im * o.im) / n,
                                (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / self.to_complex()
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / self ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- structure ---------------------------------------------------------

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self):
        return self.to_complex()

    def __abs__(self):
        return abs(self.to_complex())

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return self.to_complex() == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im >= 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}*i)"


QQi = GaussianRational
GAUSS_ZERO = QQi(0)
GAUSS_ONE = QQi(1)


def is_exact(x) -> bool:
    return isinstance(x, (GaussianRational, int, Fraction))


def as_scalar(x):
    """Normalize to GaussianRational (if exact) or complex."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x, 0)
    return complex(x)


def to_complex(x) -> complex:
    if isinstance(x, GaussianRational):
        return x.to_complex()
    return complex(x)


def scalar_is_zero(x, tol: float = 0.0) -> bool:
    if isinstance(x, GaussianRational):
        return x.is_zero()
    if isinstance(x, (int, Fraction)):
        return x == 0
    return abs(x) <= tol


def frac_sqrt(q: Fraction):
    """Exact square root of a nonnegative rational, or None."""
    if q < 0:
        return None
    if q == 0:
        return Fraction(0)
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def gauss_sqrt(z: GaussianRational):
    """Exact square root within Q(i), or None if it does not exist.

    For z = a + bi: |z| must be rational, then x^2 = (a + |z|)/2 must be a
    rational square and y = b / (2x).
    """
    z = as_scalar(z)
    if not isinstance(z, GaussianRational):
        raise TypeError("gauss_sqrt needs an exact scalar")
    a, b = z.re, z.im
    if b == 0:
        if a >= 0:
            r = frac_sqrt(a)
            return None if r is None else GaussianRational(r, 0)
        r = frac_sqrt(-a)
        return None if r is None else GaussianRational(0, r)
    mod = frac_sqrt(a * a + b * b)
    if mod is None:
        return None
    x2 = (a + mod) / 2
    x = frac_sqrt(x2)
    if x is None or x == 0:
        return None
    y = b / (2 * x)
    return GaussianRational(x, y)


def parse_exact(text: str) -> Fraction:
    """Parse a decimal or p/q string as an exact rational."""
    text = text.strip()
    return Fraction(text)
