"""Exception taxonomy.

Input-side problems (bad parameters, out-of-domain arguments) derive from
``ValueError`` so callers can treat them as invalid input; runtime numerical
problems (integration breakdown, truncation, lost unitarity) derive from
``RuntimeError``.  The CLI maps the two branches to distinct exit codes.
"""

from __future__ import annotations


class ParameterError(ValueError):
    """Invalid physical parameter (non-positive mass, frequency, ...)."""


class DomainError(ValueError):
    """Time argument outside the stroke interval [0, tau]."""


class CutoffViolationError(ValueError):
    """Stroke duration below the confinement cut-off time."""


class BracketError(RuntimeError):
    """Cut-off time bisection could not bracket a sign change."""


class IntegrationFailureError(RuntimeError):
    """ODE integration broke down (step-size underflow, b -> 0)."""


class InvertedTrapError(RuntimeError):
    """Instantaneous trap frequency squared is non-positive where a
    confining trap is required."""


class UnphysicalStateError(RuntimeError):
    """Gaussian covariance violates the Heisenberg bound beyond tolerance."""


class NumericalConsistencyError(RuntimeError):
    """A quantity landed outside its mathematically guaranteed range."""


class TruncationError(RuntimeError):
    """Fock-space truncation too small for the requested computation."""


class PropagationError(RuntimeError):
    """Time-ordered propagation failed to converge under step halving."""
