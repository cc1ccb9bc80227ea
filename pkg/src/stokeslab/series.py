"""Truncated Laurent series over C (exact Gaussian rationals or floats).

A series knows every coefficient of exponent below its truncation order
N; exponents >= N are unknown, not zero.  Truncation orders propagate
through arithmetic:

    add:  N = min(N_a, N_b)
    mul:  N = min(N_a + v_b, N_b + v_a)   (v = valuation, 0 for zero series)
    d/dz: N - 1
    integral: N + 1
    exp:  N (input valuation must be >= 1)

Values are immutable; all operations return new series.
"""

from .errors import NonPositiveValuation, ResidueObstruction, UnknownCoefficient
from .gaussian import (GaussianRational, as_scalar, is_exact, scalar_is_zero,
                       to_complex)


class TruncatedLaurentSeries:
    __slots__ = ("_c", "N")

    def __init__(self, coeffs, N):
        """coeffs: mapping exponent -> scalar.  Exponents >= N are dropped;
        zero coefficients are not stored."""
        c = {}
        for e, v in coeffs.items():
            if e >= N:
                continue
            v = as_scalar(v)
            if not scalar_is_zero(v):
                c[int(e)] = v
        object.__setattr__(self, "_c", c)
        object.__setattr__(self, "N", int(N))

    def __setattr__(self, *a):
        raise AttributeError("series are immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, N):
        return cls({}, N)

    @classmethod
    def one(cls, N, exact=True):
        return cls({0: GaussianRational(1) if exact else 1.0 + 0j}, N)

    @classmethod
    def monomial(cls, exponent, coeff, N):
        return cls({exponent: coeff}, N)

    @classmethod
    def from_terms(cls, terms, N):
        """terms: iterable of (exponent, coeff)."""
        d = {}
        for e, v in terms:
            d[e] = d.get(e, 0) + v if e in d else v
        return cls(d, N)

    # -- basic structure ------------------------------------------------------

    @property
    def k_min(self):
        """Lowest tracked exponent (0 for the zero series)."""
        return min(self._c) if self._c else 0

    def support(self):
        return sorted(self._c)

    def coeff(self, e):
        if e >= self.N:
            raise UnknownCoefficient(
                f"coefficient of z^{e} unknown at truncation order {self.N}")
        return self._c.get(e, GaussianRational(0))

    def valuation(self):
        """Lowest exponent with nonzero coefficient; None for zero series."""
        return min(self._c) if self._c else None

    def _val0(self):
        v = self.valuation()
        return 0 if v is None else v

    def is_zero(self):
        return not self._c

    def is_exact(self):
        return all(is_exact(v) for v in self._c.values())

    def items(self):
        return sorted(self._c.items())

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncatedLaurentSeries):
            return NotImplemented
        N = min(self.N, other.N)
        d = dict(self._c)
        for e, v in other._c.items():
            d[e] = d[e] + v if e in d else v
        return TruncatedLaurentSeries(d, N)

    def __neg__(self):
        return TruncatedLaurentSeries({e: -v for e, v in self._c.items()}, self.N)

    def __sub__(self, other):
        if not isinstance(other, TruncatedLaurentSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TruncatedLaurentSeries):
            return self.scale(other)
        N = min(self.N + other._val0(), other.N + self._val0())
        d = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                if e >= N:
                    continue
                d[e] = d[e] + v1 * v2 if e in d else v1 * v2
        return TruncatedLaurentSeries(d, N)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        return TruncatedLaurentSeries(
            {e: c * v for e, v in self._c.items()}, self.N)

    def shift(self, k):
        """Multiply by z^k (exact monomial; shifts the truncation order too)."""
        return TruncatedLaurentSeries(
            {e + k: v for e, v in self._c.items()}, self.N + k)

    def truncate(self, N):
        if N > self.N:
            raise UnknownCoefficient(
                f"cannot extend truncation order {self.N} to {N}")
        return TruncatedLaurentSeries(self._c, N)

    # -- calculus -------------------------------------------------------------

    def derivative(self):
        return TruncatedLaurentSeries(
            {e - 1: e * v for e, v in self._c.items() if e != 0}, self.N - 1)

    def antiderivative(self):
        if not scalar_is_zero(self._c.get(-1, GaussianRational(0))):
            raise ResidueObstruction(
                "series has a z^-1 term; antiderivative needs a logarithm")
        d = {e + 1: v / (e + 1) for e, v in self._c.items() if e != -1}
        return TruncatedLaurentSeries(d, self.N + 1)

    def exp(self):
        """exp of a series of valuation >= 1, truncated at N."""
        for e in self._c:
            if e <= 0:
                raise NonPositiveValuation(
                    f"exp_series input has a term of exponent {e} <= 0")
        one = GaussianRational(1) if self.is_exact() else 1.0 + 0j
        out = TruncatedLaurentSeries({0: one}, self.N)
        term = TruncatedLaurentSeries({0: one}, self.N)
        v = self._val0() if self._c else 1
        k = 1
        while k * v < self.N and not term.is_zero():
            term = (term * self).scale(
                GaussianRational(1, 0) / k if term.is_exact() and self.is_exact()
                else 1.0 / k)
            # keep full order: term truncation may shrink only via val growth
            out = out + term.truncate(min(self.N, term.N))
            k += 1
        return TruncatedLaurentSeries(out._c, self.N)

    # -- division -------------------------------------------------------------

    def inverse(self):
        """Multiplicative inverse of a series with nonzero valuation term.

        For valuation v and unit part u, 1/self = z^{-v} u^{-1}; the result
        carries truncation order N - 2v.
        """
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("inverse of zero series")
        unit = self.shift(-v)        # valuation 0, constant term nonzero
        n_known = unit.N             # = N - v
        c0 = unit.coeff(0)
        inv0 = (GaussianRational(1) / c0 if isinstance(c0, GaussianRational)
                else 1.0 / c0)
        coeffs = {0: inv0}
        for k in range(1, n_known):
            s = None
            for j in range(0, k):
                if j not in coeffs:
                    continue
                a = unit._c.get(k - j)
                if a is None:
                    continue
                term = a * coeffs[j]
                s = term if s is None else s + term
            if s is not None:
                coeffs[k] = -inv0 * s
        inv_unit = TruncatedLaurentSeries(coeffs, n_known)
        return inv_unit.shift(-v)

    # -- splitting ------------------------------------------------------------

    def polar_part(self):
        """Terms of exponent <= -1 (exactly known whenever N >= 0)."""
        return TruncatedLaurentSeries(
            {e: v for e, v in self._c.items() if e < 0}, max(self.N, 0))

    def regular_part(self):
        return TruncatedLaurentSeries(
            {e: v for e, v in self._c.items() if e >= 0}, self.N)

    # -- comparison -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TruncatedLaurentSeries):
            return NotImplemented
        return self.N == other.N and self._c == other._c

    def __hash__(self):
        return hash((self.N, tuple(sorted(self._c.items(),
                                          key=lambda kv: kv[0]))))

    def agrees_with(self, other, tol: float = 0.0):
        """Compare on the shared known range; truncation mismatch is allowed
        here (and only here)."""
        N = min(self.N, other.N)
        exps = {e for e in self._c if e < N} | {e for e in other._c if e < N}
        for e in exps:
            a = self._c.get(e, GaussianRational(0))
            b = other._c.get(e, GaussianRational(0))
            if is_exact(a) and is_exact(b):
                if as_scalar(a) != as_scalar(b):
                    return False
            elif abs(to_complex(a) - to_complex(b)) > tol:
                return False
        return True

    def max_abs_diff(self, other):
        N = min(self.N, other.N)
        exps = {e for e in self._c if e < N} | {e for e in other._c if e < N}
        m = 0.0
        for e in exps:
            a = to_complex(self._c.get(e, 0))
            b = to_complex(other._c.get(e, 0))
            m = max(m, abs(a - b))
        return m

    # -- conversion -----------------------------------------------------------

    def to_float(self):
        return TruncatedLaurentSeries(
            {e: to_complex(v) for e, v in self._c.items()}, self.N)

    def evaluate(self, z: complex) -> complex:
        return sum(to_complex(v) * z ** e for e, v in self._c.items())

    def evaluate_terms(self, z: complex):
        """[(exponent, |term|)] at z, for least-term truncation decisions."""
        return [(e, abs(to_complex(v) * z ** e)) for e, v in self.items()]

    def __repr__(self):
        if not self._c:
            return f"O(z^{self.N})"
        bits = []
        for e, v in self.items():
            if e == 0:
                bits.append(f"{v!r}")
            elif e == 1:
                bits.append(f"{v!r}*z")
            else:
                bits.append(f"{v!r}*z^{e}")
        return " + ".join(bits) + f" + O(z^{self.N})"


Series = TruncatedLaurentSeries


def add(a: Series, b: Series) -> Series:
    return a + b


def mul(a: Series, b: Series) -> Series:
    return a * b


def exp_series(a: Series) -> Series:
    return a.exp()


def antiderivative(a: Series) -> Series:
    return a.antiderivative()


def derivative(a: Series) -> Series:
    return a.derivative()
