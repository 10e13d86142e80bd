"""Exception hierarchy shared by all dynframes modules."""


class DynFramesError(Exception):
    """Base class for every error raised by the library."""


class PointOutsideDisc(DynFramesError, ValueError):
    pass


class NearCollision(DynFramesError, ValueError):
    """Two points are closer than the separation threshold.

    The offending (0-based) indices and their distance are kept on the
    exception so callers can report them.
    """

    def __init__(self, i, j, distance, what="points"):
        self.pair = (i, j)
        self.distance = distance
        super().__init__(
            f"{what} {i} and {j} are not separated: "
            f"pseudohyperbolic distance {distance:.3e}"
        )


class ProductCollision(NearCollision):
    """Two eigenvalue products lambda_k * gamma_l coincide."""

    def __init__(self, first, second, distance):
        self.first = first
        self.second = second
        self.pair = (first, second)
        self.distance = distance
        DynFramesError.__init__(
            self,
            f"products at (k, l) = {first} and {second} collide: "
            f"pseudohyperbolic distance {distance:.3e}",
        )


class InvalidSpec(DynFramesError, ValueError):
    pass


class InvalidParameter(DynFramesError, ValueError):
    pass


class SequenceTooShort(DynFramesError, ValueError):
    pass


class DimensionMismatch(DynFramesError, ValueError):
    pass


class MissingOperator(DynFramesError, ValueError):
    pass


class MissingBase(DynFramesError, ValueError):
    pass


class InsufficientVectors(DynFramesError, ValueError):
    pass


class NotAFrame(DynFramesError, ArithmeticError):
    pass


class IllConditioned(DynFramesError, ArithmeticError):
    pass


class ToleranceNotReached(DynFramesError, ArithmeticError):
    def __init__(self, message, iterations=None, residual=None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)
