"""Exception hierarchy shared by the toolkit."""


class SymSystoleError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(SymSystoleError, ValueError):
    """Vectors or matrices of incompatible sizes were combined."""


class InvolutionError(SymSystoleError, ValueError):
    """A matrix failed the anti-symplectic involution checks."""


class ClosureError(SymSystoleError, ValueError):
    """A loop that should be closed is not.

    The size of the gap is kept on ``gap``.
    """

    def __init__(self, message: str, gap: float):
        super().__init__(message)
        self.gap = gap


class ConstructionError(SymSystoleError, ValueError):
    """Degenerate input to a geometric construction."""


class DomainError(SymSystoleError, ValueError):
    """A domain failed its defining invariants or got invalid parameters."""


class FlowError(SymSystoleError, RuntimeError):
    """Numerical integration failed (step size underflow, off-level start, ...)."""

    def __init__(self, message: str, location=None, time: float | None = None):
        super().__init__(message)
        self.location = location
        self.time = time


class SpectrumError(SymSystoleError, ValueError):
    """An equilibrium does not have the requested linear type."""


class ConvergenceError(SymSystoleError, RuntimeError):
    """Newton refinement failed; ``history`` holds the residuals seen."""

    def __init__(self, message: str, history=()):
        super().__init__(message)
        self.history = list(history)


class SymmetryDiagnosticError(SymSystoleError, RuntimeError):
    """Two independent symmetry tests disagree about the same orbit."""
