"""Exception hierarchy shared by all modules.

The split mirrors the tool's exit-code and HTTP contracts: everything that is
the caller's fault (bad values, bad units, bad configuration, bad data) maps
to validation failures (HTTP 422, exit code 2), while failures of the
numerics themselves (non-convergent quadrature, overflow, NaN trajectories)
map to numeric failures (HTTP 500, exit code 3).
"""


class IvlabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(IvlabError):
    """A physical parameter is outside the model's domain of validity."""


class UnitError(IvlabError):
    """Unknown unit string or dimensionally incompatible conversion."""


class ConfigError(IvlabError):
    """Malformed configuration, data file, or request."""


class ExtractionError(IvlabError):
    """Switching-current extraction has no usable points."""


class FitError(IvlabError):
    """Fit input is degenerate (too few points, repeated abscissae, ...)."""


class NumericError(IvlabError):
    """A numerical method failed to produce a trustworthy result."""


#: errors that indicate caller mistakes (validation channel)
VALIDATION_ERRORS = (DomainError, UnitError, ConfigError, ExtractionError, FitError)
