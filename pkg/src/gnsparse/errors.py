"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class;
plain ValueError/TypeError are reserved for programming errors.
"""


class GnsparseError(Exception):
    """Base class for all package-specific errors."""


class UnresolvableFunctionError(GnsparseError):
    """A test-function spec is too fine for the grid (width <= 4h)."""


class EmptyRegionError(GnsparseError):
    """An integral or average was requested over an empty region."""


class WindowExitError(GnsparseError):
    """An escape interval endpoint falls outside the analysis window."""

    def __init__(self, message, node=None, side=None):
        super().__init__(message)
        self.node = node
        self.side = side


class CorpusConfigError(GnsparseError):
    """A corpus member is incompatible with the analysis window or config."""


class ConstructionError(GnsparseError):
    """A built covering family violates one of its structural guarantees."""


class BandPreconditionError(GnsparseError):
    """An interval handed to a bound check violates the dyadic band condition."""


class ModularRangeError(GnsparseError):
    """A Young function overflowed while evaluating a modular."""

    def __init__(self, message, argument=None):
        super().__init__(message)
        self.argument = argument


class YoungBracketError(GnsparseError):
    """Luxemburg bisection could not bracket the unit-modular scale."""


class AdmissibilityError(GnsparseError):
    """A space descriptor or combined descriptor has inadmissible parameters."""


class ConfigError(GnsparseError):
    """A run configuration cannot be parsed or validated (CLI exit status 2)."""
