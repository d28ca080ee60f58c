"""Exception hierarchy shared by every module of the package."""


class SR2Error(Exception):
    """Base class for all package errors.

    ``iteration`` is filled in by the solver driver when the error is raised
    from inside an iteration.
    """

    iteration = None


class ArgumentError(SR2Error, ValueError):
    """An argument has the wrong shape, sign or domain."""


class IllPosedProxError(SR2Error, ValueError):
    """A weakly convex prox was queried with a step that makes the
    subproblem nonconvex (``eta >= -1/mu_h``)."""


class NumericError(SR2Error, ArithmeticError):
    """A quantity that must be positive or real came out otherwise."""


class InvariantViolation(NumericError):
    """An internal guarantee of the method failed to hold."""


class DivergenceError(NumericError):
    """An iterate or trajectory state became non-finite."""


class BacktrackingError(NumericError):
    """Backtracking pushed the Lipschitz estimate past its ceiling."""
