"""Exception types shared across the package."""


class CovnetError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(CovnetError):
    """Shapes or sizes of inputs are inconsistent."""


class InvalidDimension(CovnetError):
    """A size parameter is outside its valid range."""


class NumericError(CovnetError):
    """Non-finite values or a failed numerical routine."""


class NotPositiveDefinite(CovnetError):
    """A matrix required to be positive definite is not."""


class EmptyData(CovnetError):
    """A dataset contains no rows."""


class ParseError(CovnetError):
    """A cell of an input table could not be parsed as a number."""


class DegenerateVariable(CovnetError):
    """A variable has (numerically) zero empirical variance."""


class DegenerateState(CovnetError):
    """An iterate reached a state where a computation is undefined."""


class NoConvergedCell(CovnetError):
    """No cell of a tuning grid produced a converged fit."""


class EmptyGrid(CovnetError):
    """A tuning grid contains no cells."""


class ConvergenceFailure(CovnetError):
    """An inner solver hit its iteration cap before reaching tolerance.

    Carries the last iterate and the final primal/dual residuals; when
    raised from the consensus update it is annotated with the node pair
    ``edge`` whose subproblem failed.
    """

    def __init__(self, message, iterate=None, primal_residual=None,
                 dual_residual=None, edge=None):
        super().__init__(message)
        self.iterate = iterate
        self.primal_residual = primal_residual
        self.dual_residual = dual_residual
        self.edge = edge
