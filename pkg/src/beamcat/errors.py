"""Exception types shared across the package.

The CLI maps these onto its exit codes, so library code should raise the most
specific one that applies rather than bare ValueError/RuntimeError.
"""


class BeamcatError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BeamcatError, ValueError):
    """A parameter lies outside the mathematical domain of an operation."""


class RangeCapError(DomainError):
    """A documented supported-range cap was exceeded (e.g. closed-form
    evaluators are only guaranteed up to m = 20 without rescaling)."""


class ZeroProbabilityError(BeamcatError):
    """The requested conditional event has probability zero."""


class NumericalError(BeamcatError):
    """A numerical procedure failed to reach its contracted tolerance."""


class ConfigError(BeamcatError):
    """Invalid or inconsistent run configuration."""
