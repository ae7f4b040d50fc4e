"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`PolyExpError`.  The CLI maps :class:`InsufficientMoments` to exit
code 2, :class:`ParseError` to exit code 1 and every other
:class:`NumericalFailure` to exit code 3.
"""


class PolyExpError(Exception):
    """Base class for all library errors."""


class ParseError(PolyExpError, ValueError):
    """Malformed input document."""


class PreconditionViolation(PolyExpError, ValueError):
    """An argument does not satisfy the documented precondition."""


class OutOfSupport(PolyExpError, KeyError):
    """A moment outside the support of a sequence was requested."""

    def __init__(self, alpha, message=None):
        self.alpha = tuple(alpha)
        super().__init__(message or f"exponent {self.alpha} is outside the support")

    def __str__(self):
        return self.args[0]


class InsufficientMoments(PolyExpError):
    """The moments do not cover the products needed by the algorithm."""

    def __init__(self, message, alpha=None):
        self.alpha = None if alpha is None else tuple(alpha)
        super().__init__(message)


class EmptyResult(PolyExpError):
    """An operation would produce a sequence with empty support."""


class ZeroPolynomial(PolyExpError, ValueError):
    """A nonzero polynomial was required."""


class ZeroSequence(PolyExpError):
    """The moment sequence vanishes on its whole support."""


class NumericalFailure(PolyExpError):
    """Base class for failures of the numerical pipeline."""


class NoConvergence(NumericalFailure):
    """An iterative dense kernel did not converge."""


class SingularMatrix(NumericalFailure):
    """A linear system is numerically singular."""

    def __init__(self, message, condition=float("inf")):
        self.condition = condition
        super().__init__(message)


class NoSeparatingForm(NumericalFailure):
    """No random linear form separated the joint spectrum."""


class DegenerateEigenvector(NumericalFailure):
    """An eigenvector pairs to (numerically) zero with the sequence."""


class SingularClusterGram(NumericalFailure):
    """The Gram matrix of a spectral cluster is numerically singular."""

    def __init__(self, message, cluster=None):
        self.cluster = cluster
        super().__init__(message)


class RankDeficient(NumericalFailure):
    """A Hankel matrix has smaller numeric rank than requested."""

    def __init__(self, actual_rank, message=None):
        self.actual_rank = actual_rank
        super().__init__(message or f"numeric rank is only {actual_rank}")


class ZeroFrequency(NumericalFailure):
    """A recovered frequency component is zero, so its logarithm is undefined."""


class NonIntegerExponent(NumericalFailure):
    """A recovered frequency is not an integer power of the base point."""

    def __init__(self, component, rounded, gap):
        self.component = component
        self.rounded = rounded
        self.gap = gap
        super().__init__(
            f"frequency component {component!r} is not a power of lambda "
            f"(nearest exponent {rounded}, gap {gap:.3g})"
        )


class CollidingFrequencies(NumericalFailure):
    """Two recovered frequencies coincide."""


class OffCircle(NumericalFailure):
    """A recovered frequency is not on the unit circle."""

    def __init__(self, gap):
        self.gap = gap
        super().__init__(f"frequency modulus deviates from 1 by {gap:.3g}")
