"""Exception hierarchy for foxh-kit.

Callers can catch ``FoxHError`` to handle any numeric/structural failure from
this package, or the specific subclasses to distinguish bad inputs from
evaluation breakdowns.
"""

from __future__ import annotations


class FoxHError(Exception):
    """Base class for all foxh-kit errors."""


class ParameterError(FoxHError, ValueError):
    """Invalid parameter value (domain violation, bad shape, bad format)."""


class StructuralValidationError(ParameterError):
    """A descriptor failed structural validation.

    Carries the full list of violations so callers can report all problems at
    once instead of fixing them one by one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class PoleError(FoxHError, ValueError):
    """Evaluation requested at (or within tolerance of) a gamma-function pole."""


class RangeOverflowError(FoxHError, OverflowError):
    """A special-function value exceeds the double-precision range."""


class NoSeparatingStripError(FoxHError):
    """No contour abscissa separates the left and right pole families."""


class ConvergenceError(FoxHError):
    """The adaptive contour quadrature failed to converge."""


class ImaginaryResidueError(FoxHError):
    """A nominally real result retained a too-large imaginary part."""


class DivergenceError(FoxHError):
    """An integral transform precondition fails (integrand not integrable)."""
