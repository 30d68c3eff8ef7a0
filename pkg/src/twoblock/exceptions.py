"""Exception and warning types shared across the package.

Every error raised by this package derives from ``TwoblockError`` so callers
can catch the library's failures with a single except clause. Names mirror
the failure they report; constructors accept a human-readable message.
"""


class TwoblockError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteInput(TwoblockError):
    """A data matrix contains NaN or infinite entries."""


class ConstantColumn(TwoblockError):
    """Unit-variance scaling was requested for a column with zero spread."""


class ZeroMatrix(TwoblockError):
    """A matrix required to be nonzero has no entry above the zero threshold."""


class ZeroVector(TwoblockError):
    """A vector required to be nonzero has no entry above the zero threshold."""


class NoConvergence(TwoblockError):
    """Power iteration failed to converge within the iteration cap."""

    def __init__(self, iterations: int, message: str | None = None):
        self.iterations = iterations
        super().__init__(
            message or f"power iteration did not converge in {iterations} iterations"
        )


class DimensionMismatch(TwoblockError):
    """Operands have incompatible shapes."""


class ColumnMismatch(TwoblockError):
    """Prediction-time column names do not match the training columns."""


class ComponentCountTooLarge(TwoblockError):
    """A requested component count exceeds the admissible rank bound."""


class SingularGram(TwoblockError):
    """The component Gram matrix is numerically singular.

    Raised when the condition estimate of the h-by-h Gram matrix used for
    the coefficient solve exceeds 1e12. Reducing the number of predictor
    components usually resolves this.
    """


class TooFewRows(TwoblockError):
    """Fewer rows than cross-validation folds."""


class AllPointsInfeasible(TwoblockError):
    """Every grid point failed its preconditions on some training fold."""


class IoFailure(TwoblockError):
    """A model archive could not be written or read."""


class SchemaMismatch(TwoblockError):
    """A model archive declares an unsupported schema version."""


class CorruptArchive(TwoblockError):
    """A model archive is unreadable or structurally invalid."""


class DegenerateResidualWarning(UserWarning):
    """A residual block vanished before the requested component count.

    The fit truncates to the achieved count and flags the model instead of
    failing; this warning carries the component index at which the residual
    degenerated.
    """
