"""Energy-method Lyapunov stability of rigid-body relative equilibria.

Two Hamilton-Poisson systems are covered: a rigid spacecraft on a
stationary orbit around a uniformly rotating asteroid, and a neutrally
buoyant submerged vehicle with added-mass coupling. For each, the package
builds a quaternion chart on the symplectic leaf through the equilibrium,
evaluates the closed-form reduced Hessian there, and decides the
sufficient stability conditions, cross-validating every closed form
against finite-difference and simulation oracles.
"""

from .common import Verdict
from .errors import (
    AdmissibilityError,
    ChartDomainError,
    ConvergenceError,
    DegenerateEquilibrium,
    InternalInconsistency,
    NonFiniteState,
)
from .numerics import Definiteness, DefinitenessClass, Trajectory

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "ChartDomainError",
    "ConvergenceError",
    "DegenerateEquilibrium",
    "Definiteness",
    "DefinitenessClass",
    "InternalInconsistency",
    "NonFiniteState",
    "Trajectory",
    "Verdict",
    "__version__",
]
