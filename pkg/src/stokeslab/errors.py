"""Exception hierarchy for stokeslab.

Validation failures (bad inputs, violated preconditions) derive from
ValidationError; numerical failures (tolerances unreachable, diverged
iterations) derive from NumericalError.  The CLI maps these onto exit
codes 2 and 3 respectively.
"""


class StokesLabError(Exception):
    pass


class ValidationError(StokesLabError):
    pass


class NumericalError(StokesLabError):
    pass


# series ------------------------------------------------------------------

class NonPositiveValuation(ValidationError):
    """exp_series input has a term of exponent <= 0."""


class ResidueObstruction(ValidationError):
    """Antiderivative requested for a series with a z^-1 term."""


class UnknownCoefficient(ValidationError):
    """Coefficient above the truncation order was requested."""


# exponents ----------------------------------------------------------------

class ReducibilitySearchTooLarge(ValidationError):
    """The sum-of-residues search space exceeds the configured bound."""


# formal -------------------------------------------------------------------

class BadExponentSupport(ValidationError):
    """Exponent series has support outside [-m, -1]."""


class NonInvertibleGauge(ValidationError):
    pass


class NonGenericLeadingTerm(ValidationError):
    """Leading coefficient matrix has a repeated eigenvalue."""


class ResonantRegular(ValidationError):
    """m = 1 with integer eigenvalue difference; splitting not solvable."""


class ExactEigenvaluesNotInField(ValidationError):
    """Leading eigenvalues are not Gaussian rationals; use float mode."""


class DepthBelowPoleOrder(ValidationError):
    pass


# stokes geometry ----------------------------------------------------------

class NonGenericAtPoint(ValidationError):
    """Two top coefficients coincide at the requested point."""


# monodromy ----------------------------------------------------------------

class NotIrreducible(ValidationError):
    pass


class DegenerateOrbit(ValidationError):
    """All gauge-fixing patterns failed while normalizing."""


class NotOnVariety(ValidationError):
    """Relation residual too large for a tangent computation."""


# rh_numeric ---------------------------------------------------------------

class PathTooClose(ValidationError):
    pass


class ToleranceNotMet(NumericalError):
    """Adaptive integration failed to meet the requested tolerance."""


class MatchingRadiusNotFound(NumericalError):
    """No radius meets the matching tolerance at the available order."""


class SupportViolation(NumericalError):
    """A Stokes matrix entry off the J(d,i) pattern exceeds tolerance."""


class ExponentMismatch(ValidationError):
    """Computed local exponents do not match the prescribed tuple."""


# isomonodromy ---------------------------------------------------------------

class StepRejected(NumericalError):
    """Deformation step rejected (pole collision or step underflow)."""


class NonFuchsianInput(ValidationError):
    pass


class CorrectorDiverged(NumericalError):
    pass
