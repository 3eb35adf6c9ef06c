"""Exception taxonomy.

The CLI maps these onto exit codes: configuration problems exit 2,
numerical failures exit 3, I/O problems exit 4.
"""


class EdecohError(Exception):
    """Base class for all package errors."""


class DomainError(EdecohError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class ConfigError(EdecohError, ValueError):
    """Invalid, inconsistent or unknown configuration input."""


class NumericalError(EdecohError, RuntimeError):
    """A numerical procedure failed (instability, divergence, aliasing)."""


class InvalidCoherenceError(DomainError):
    """Initial coherence width exceeds the spatial beam width."""


class WindowingError(NumericalError):
    """Far-field intensity leaks into the edge of the frequency window."""


class ResolutionError(NumericalError):
    """Grid too coarse to resolve a required structure."""


class DecompositionError(NumericalError):
    """Pure-state decomposition failed to reach the reconstruction tolerance."""


class FitError(NumericalError):
    """Nonlinear least-squares fit did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class InsufficientStructureError(FitError):
    """Line-out lacks enough visible peaks to initialise a fit."""


class SearchError(NumericalError):
    """A bracketing/bisection search could not reach its target."""


class BoundaryError(EdecohError, ValueError):
    """Requested sampling lies outside the detector image."""
