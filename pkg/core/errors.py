"""
Exception hierarchy shared by every isoflow package.
"""


class IsoflowError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""


class DomainError(IsoflowError):
    """Evaluation outside the region where a formula or series is valid."""


class DegeneracyError(IsoflowError):
    """A Hessian or conformal factor vanishes where it must not."""


class EmptyCurveError(IsoflowError):
    """Curve with no extent (start point at the well, constant curve)."""


class PreconditionError(IsoflowError):
    """Caller violated an operation contract."""


class CertificateError(IsoflowError):
    """A calibration certificate cannot be trusted (residual too large)."""


class NumericalSingularityError(IsoflowError):
    """Linear system too ill-conditioned to solve."""


class GridError(IsoflowError):
    """Sampling grid too short or too coarse for the requested operation."""


class ConfigError(IsoflowError):
    """Bad run configuration or potential description."""
