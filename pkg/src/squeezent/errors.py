"""Exception types shared across the package.

The CLI maps these onto exit codes, so keep the hierarchy flat.
"""


class UnphysicalParameters(ValueError):
    """Parameters outside their physical domain (e.g. |M| > sqrt(N(N+1)))."""


class BasisMismatch(ValueError):
    """Operands live on different truncated Fock spaces."""


class NumericalFailure(ArithmeticError):
    """Non-finite intermediate, failed convergence, or invariant violation."""


class DegenerateSteadyState(NumericalFailure):
    """The generator has more than one stationary state."""
