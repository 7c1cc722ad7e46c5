"""Exception types shared across the library."""


class ChartDomainError(ValueError):
    """Chart point too close to (or outside) the open unit ball."""


class ConvergenceError(RuntimeError):
    """An iterative kernel failed to reach its stopping tolerance."""


class NonFiniteState(RuntimeError):
    """Integration produced a non-finite state component.

    Attributes:
        step: index of the first step at which a non-finite value appeared.
    """

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"non-finite state at step {step}")


class AdmissibilityError(ValueError):
    """Vehicle parameters violate a physical or positivity inequality."""


class DegenerateEquilibrium(ValueError):
    """Requested equilibrium lies outside the generic family (Q2 = 0)."""


class InternalInconsistency(AssertionError):
    """Closed-form result and its independent cross-check disagree.

    Signals an implementation bug, never a user error.
    """
